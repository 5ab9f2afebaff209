#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "uranex/qp.hpp"

using namespace uranex;

TEST(Qp, SingleActiveConstraint)
{
    // min 1/2 |z|^2 - z1 - z2  s.t.  z1 + z2 <= 1  ->  z = (1/2, 1/2), lambda = 1/2
    DenseQp qp{Eigen::Matrix2d::Identity(), -Eigen::Vector2d::Ones(), Eigen::RowVector2d(1.0, 1.0),
               Eigen::VectorXd::Constant(1, 1.0)};
    const auto r = solve_qp(qp, Eigen::Vector2d::Zero());
    ASSERT_TRUE(r.converged);
    EXPECT_NEAR(r.z(0), 0.5, 1e-12);
    EXPECT_NEAR(r.z(1), 0.5, 1e-12);
    EXPECT_NEAR(r.multipliers(0), 0.5, 1e-12);
}

TEST(Qp, InactiveConstraintsGiveUnconstrainedMinimum)
{
    Eigen::Matrix2d H;
    H << 4.0, 1.0, 1.0, 2.0;
    const Eigen::Vector2d c(-1.0, -1.0);
    Eigen::MatrixXd G(2, 2);
    G << 1.0, 0.0, 0.0, 1.0;
    const Eigen::Vector2d h(10.0, 10.0);
    const auto r = solve_qp({H, c, G, h}, Eigen::Vector2d::Zero());
    ASSERT_TRUE(r.converged);
    const Eigen::Vector2d expect = H.ldlt().solve(-c);
    EXPECT_NEAR((r.z - expect).norm(), 0.0, 1e-12);
    EXPECT_EQ(r.multipliers.norm(), 0.0);
}

TEST(Qp, BoxProjection)
{
    // Identity Hessian: the solution is the clamp of the unconstrained minimum.
    const int n = 5;
    const Eigen::VectorXd target = (Eigen::VectorXd(n) << 3.0, -2.0, 0.5, 7.0, -0.1).finished();
    Eigen::MatrixXd G(2 * n, n);
    G << Eigen::MatrixXd::Identity(n, n), -Eigen::MatrixXd::Identity(n, n);
    const Eigen::VectorXd h = Eigen::VectorXd::Ones(2 * n);
    const auto r = solve_qp({Eigen::MatrixXd::Identity(n, n), -target, G, h}, Eigen::VectorXd::Zero(n));
    ASSERT_TRUE(r.converged);
    for (int i = 0; i < n; ++i) {
        EXPECT_NEAR(r.z(i), std::clamp(target(i), -1.0, 1.0), 1e-12);
    }
}

TEST(Qp, KktOnRandomProblems)
{
    std::mt19937_64 rng(3);
    std::normal_distribution<double> N;
    for (int trial = 0; trial < 20; ++trial) {
        const int n = 6;
        const int m = 10;
        Eigen::MatrixXd A(n, n);
        Eigen::MatrixXd G(m, n);
        Eigen::VectorXd c(n);
        Eigen::VectorXd h(m);
        for (int i = 0; i < n; ++i) {
            c(i) = N(rng);
            for (int j = 0; j < n; ++j) {
                A(i, j) = N(rng);
            }
        }
        for (int i = 0; i < m; ++i) {
            h(i) = std::abs(N(rng)) + 0.1;
            for (int j = 0; j < n; ++j) {
                G(i, j) = N(rng);
            }
        }
        const Eigen::MatrixXd H = A * A.transpose() + 0.1 * Eigen::MatrixXd::Identity(n, n);
        const auto r = solve_qp({H, c, G, h}, Eigen::VectorXd::Zero(n));
        ASSERT_TRUE(r.converged);
        const Eigen::VectorXd stat = H * r.z + c + G.transpose() * r.multipliers;
        EXPECT_LT(stat.lpNorm<Eigen::Infinity>(), 1e-9);
        const Eigen::VectorXd slack = h - G * r.z;
        EXPECT_GT(slack.minCoeff(), -1e-10);
        EXPECT_GE(r.multipliers.minCoeff(), 0.0);
        EXPECT_LT(std::abs(r.multipliers.dot(slack)), 1e-9);
    }
}

TEST(Qp, RejectsInfeasibleStartAndBadShapes)
{
    DenseQp qp{Eigen::Matrix2d::Identity(), Eigen::Vector2d::Zero(), Eigen::RowVector2d(1.0, 0.0),
               Eigen::VectorXd::Constant(1, -1.0)};
    EXPECT_THROW(solve_qp(qp, Eigen::Vector2d::Zero()), std::invalid_argument);
    EXPECT_THROW(solve_qp(qp, Eigen::Vector3d::Zero()), std::invalid_argument);
}
