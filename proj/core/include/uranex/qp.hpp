#pragma once

#include <Eigen/Dense>

namespace uranex {

/// Dense convex QP:  min 1/2 z'Hz + c'z  subject to  G z <= h.
/// H must be positive definite.
struct DenseQp {
    Eigen::MatrixXd H;
    Eigen::VectorXd c;
    Eigen::MatrixXd G;
    Eigen::VectorXd h;
};

struct QpResult {
    Eigen::VectorXd z;
    Eigen::VectorXd multipliers;  // one per row of G, >= 0
    int iterations = 0;
    bool converged = false;
};

struct QpOptions {
    double tolerance = 1e-12;  // relative to the scaled problem data
    int max_iterations = 500;  // working-set changes
};

/**
 * Primal active-set method started from a feasible point z0. Rows and
 * variables are equilibrated first. Throws std::invalid_argument on
 * inconsistent dimensions or an infeasible start.
 */
QpResult solve_qp(const DenseQp& qp, const Eigen::VectorXd& z0, const QpOptions& options = {});

}  // namespace uranex
