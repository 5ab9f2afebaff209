#include "uranex/qp.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace uranex {

namespace {

struct Scaling {
    Eigen::VectorXd D;  // variables
    Eigen::VectorXd E;  // rows
    double cost = 1.0;
};

// Ruiz equilibration of [H G'; G 0], then the cost is scaled so that the mean
// diagonal of H is one.
Scaling equilibrate(DenseQp& s)
{
    const auto n = s.H.rows();
    const auto m = s.G.rows();
    Scaling sc{Eigen::VectorXd::Ones(n), Eigen::VectorXd::Ones(m), 1.0};
    for (int pass = 0; pass < 25; ++pass) {
        Eigen::VectorXd dc(n);
        Eigen::VectorXd er(m);
        for (Eigen::Index j = 0; j < n; ++j) {
            double v = s.H.col(j).cwiseAbs().maxCoeff();
            if (m > 0) {
                v = std::max(v, s.G.col(j).cwiseAbs().maxCoeff());
            }
            dc(j) = v > 0.0 ? 1.0 / std::sqrt(v) : 1.0;
        }
        for (Eigen::Index i = 0; i < m; ++i) {
            const double v = s.G.row(i).cwiseAbs().maxCoeff();
            er(i) = v > 0.0 ? 1.0 / std::sqrt(v) : 1.0;
        }
        s.H = dc.asDiagonal() * s.H * dc.asDiagonal();
        s.G = er.asDiagonal() * s.G * dc.asDiagonal();
        sc.D = sc.D.cwiseProduct(dc);
        sc.E = sc.E.cwiseProduct(er);
        if ((dc.array() - 1.0).abs().maxCoeff() < 1e-3 &&
            (m == 0 || (er.array() - 1.0).abs().maxCoeff() < 1e-3)) {
            break;
        }
    }
    s.c = sc.D.cwiseProduct(s.c);
    s.h = sc.E.cwiseProduct(s.h);
    const double h_mean = n > 0 ? s.H.diagonal().cwiseAbs().mean() : 1.0;
    sc.cost = 1.0 / std::clamp(h_mean, 1e-12, 1e12);
    s.H *= sc.cost;
    s.c *= sc.cost;
    return sc;
}

}  // namespace

QpResult solve_qp(const DenseQp& qp, const Eigen::VectorXd& z0, const QpOptions& options)
{
    const auto n = qp.H.rows();
    const auto m = qp.G.rows();
    if (qp.H.cols() != n || qp.c.size() != n || qp.G.cols() != n || qp.h.size() != m ||
        z0.size() != n) {
        throw std::invalid_argument("solve_qp: inconsistent dimensions");
    }

    DenseQp s = qp;
    const Scaling sc = equilibrate(s);
    Eigen::VectorXd z = z0.cwiseQuotient(sc.D);
    const double tol = options.tolerance;
    const double h_scale = 1.0 + (m > 0 ? s.h.lpNorm<Eigen::Infinity>() : 0.0);
    if (m > 0 && (s.G * z - s.h).maxCoeff() > 1e-8 * h_scale) {
        throw std::invalid_argument("solve_qp: starting point is infeasible");
    }

    QpResult res;
    Eigen::VectorXd lam = Eigen::VectorXd::Zero(m);
    std::vector<Eigen::Index> work;
    std::vector<char> in_work(static_cast<std::size_t>(m), 0);
    for (int it = 1; it <= options.max_iterations; ++it) {
        res.iterations = it;
        const auto k = static_cast<Eigen::Index>(work.size());
        const Eigen::VectorXd g = s.H * z + s.c;

        // Equality-constrained step on the working set.
        Eigen::MatrixXd K = Eigen::MatrixXd::Zero(n + k, n + k);
        K.topLeftCorner(n, n) = s.H;
        for (Eigen::Index a = 0; a < k; ++a) {
            const Eigen::Index row = work[static_cast<std::size_t>(a)];
            K.block(n + a, 0, 1, n) = s.G.row(row);
            K.block(0, n + a, n, 1) = s.G.row(row).transpose();
        }
        Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n + k);
        rhs.head(n) = -g;
        const Eigen::VectorXd sol = K.fullPivLu().solve(rhs);
        if (!sol.allFinite()) {
            break;
        }
        const Eigen::VectorXd p = sol.head(n);
        const Eigen::VectorXd mu = sol.tail(k);

        if (p.lpNorm<Eigen::Infinity>() <= tol * (1.0 + z.lpNorm<Eigen::Infinity>())) {
            lam.setZero();
            Eigen::Index worst = -1;
            double most_negative = -tol * (1.0 + g.lpNorm<Eigen::Infinity>());
            for (Eigen::Index a = 0; a < k; ++a) {
                lam(work[static_cast<std::size_t>(a)]) = std::max(0.0, mu(a));
                if (mu(a) < most_negative) {
                    most_negative = mu(a);
                    worst = a;
                }
            }
            if (worst < 0) {
                res.converged = true;
                break;
            }
            in_work[static_cast<std::size_t>(work[static_cast<std::size_t>(worst)])] = 0;
            work.erase(work.begin() + worst);
            continue;
        }

        double alpha = 1.0;
        Eigen::Index blocking = -1;
        for (Eigen::Index i = 0; i < m; ++i) {
            if (in_work[static_cast<std::size_t>(i)]) {
                continue;
            }
            const double gp = s.G.row(i).dot(p);
            if (gp <= 1e-14 * s.G.row(i).cwiseAbs().maxCoeff() * p.lpNorm<Eigen::Infinity>()) {
                continue;
            }
            const double ratio = std::max(0.0, s.h(i) - s.G.row(i).dot(z)) / gp;
            if (ratio < alpha) {
                alpha = ratio;
                blocking = i;
            }
        }
        z += alpha * p;
        if (blocking >= 0) {
            work.push_back(blocking);
            in_work[static_cast<std::size_t>(blocking)] = 1;
        }
    }

    res.z = sc.D.cwiseProduct(z);
    res.multipliers = sc.E.cwiseProduct(lam) / sc.cost;
    return res;
}

}  // namespace uranex
