#include "uranex/nmpc.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "uranex/dual.hpp"
#include "uranex/qp.hpp"

namespace uranex {

namespace {

// Directions carried per forward-mode pass. Pass k differentiates with respect
// to inputs [k * kChunk, (k + 1) * kChunk) and starts at the first of them,
// since earlier states do not depend on those inputs.
constexpr int kChunk = 4;
using ChunkDual = Dual<kChunk>;

}  // namespace

double InputBounds::clamp(double u, double u_prev) const
{
    u = std::clamp(u, u_min, u_max);
    return std::clamp(u, u_prev + du_min, u_prev + du_max);
}

MpcWeights MpcWeights::standard(int n_states, double u_set)
{
    MpcWeights w;
    w.Q.assign(static_cast<std::size_t>(n_states), 1.0);
    w.P.assign(static_cast<std::size_t>(n_states), 1.0);
    w.R = 1.0 / u_set;
    w.S = 1.0 / u_set;
    return w;
}

void MpcWeights::validate(std::size_t n_states) const
{
    if (Q.size() != n_states || P.size() != n_states) {
        throw ConfigError("weights: Q and P must have one entry per state");
    }
    auto positive = [](double v) { return std::isfinite(v) && v > 0.0; };
    if (!std::all_of(Q.begin(), Q.end(), positive) || !std::all_of(P.begin(), P.end(), positive)) {
        throw ConfigError("weights: Q and P must be positive definite (positive diagonal)");
    }
    if (!positive(R) || !positive(S)) {
        throw ConfigError("weights: R and S must be > 0");
    }
}

std::string to_string(OcpStatus s)
{
    switch (s) {
    case OcpStatus::Optimal: return "optimal";
    case OcpStatus::MaxIterations: return "max_iterations";
    case OcpStatus::LineSearchFailure: return "line_search_failure";
    }
    return "unknown";
}

OcpProblem::OcpProblem(OcpSpec spec, const FlowSheet& fs)
    : spec_(std::move(spec)), fs_(&fs), rho_(spec_.rho), n_sub_(0)
{
    if (spec_.horizon < 1) {
        throw std::invalid_argument("build_ocp: horizon must be >= 1");
    }
    if (spec_.x_k.n_stages() != fs.n_stages || spec_.setpoint.x_set.n_stages() != fs.n_stages) {
        throw std::invalid_argument("build_ocp: state size does not match flowsheet");
    }
    const auto& b = spec_.bounds;
    if (!(b.u_min < b.u_max) || !(b.du_min < 0.0) || !(b.du_max > 0.0)) {
        throw std::invalid_argument("build_ocp: inconsistent input bounds");
    }
    spec_.weights.validate(spec_.x_k.size());
    n_sub_ = substep_count(spec_.T_s, spec_.h_sub);
    if (rho_ <= 0.0) {
        rho_ = 1e6 * *std::max_element(spec_.weights.Q.begin(), spec_.weights.Q.end());
    }
    x_set_ = spec_.setpoint.x_set.vector();
}

OcpProblem build_ocp(const OcpSpec& spec, const FlowSheet& fs) { return {spec, fs}; }

ShootingEval OcpProblem::evaluate(std::span<const double> u, bool derivatives) const
{
    const int N = spec_.horizon;
    if (static_cast<int>(u.size()) != N) {
        throw std::invalid_argument("OcpProblem::evaluate: wrong input sequence length");
    }
    const FlowSheet& fs = *fs_;
    const double h = spec_.T_s / n_sub_;
    const auto nx = spec_.x_k.size();
    const auto& W = spec_.weights;
    const double u_set = spec_.setpoint.u_set;

    ShootingEval e;
    e.states.reserve(static_cast<std::size_t>(N) + 1);
    e.states.push_back(spec_.x_k);
    std::vector<double> x = spec_.x_k.vector();
    std::vector<double> work;
    double clamped = 0.0;
    for (int i = 0; i < N; ++i) {
        if (!detail::euler_advance<double>(x, u[i], spec_.p_hat, fs, n_sub_, h, work, clamped)) {
            throw NumericalError("nmpc prediction diverged; reduce h_sub_pred");
        }
        e.states.emplace_back(fs.n_stages, x);
    }

    auto state_weight = [&](int i) -> const std::vector<double>& { return i < N ? W.Q : W.P; };
    double u_prev = spec_.u_prev;
    for (int i = 0; i <= N; ++i) {
        const auto& wi = state_weight(i);
        const auto xs = e.states[static_cast<std::size_t>(i)].values();
        for (std::size_t r = 0; r < nx; ++r) {
            const double dx = xs[r] - x_set_[r];
            e.tracking += wi[r] * dx * dx;
        }
        if (i < N) {
            const double du = u[i] - u_set;
            const double step = u[i] - u_prev;
            e.tracking += W.R * du * du + W.S * step * step;
            u_prev = u[i];
        }
    }
    const auto ridx = raffinate_index(fs.n_stages);
    for (int i = 1; i <= N; ++i) {
        e.raffinate.push_back(e.states[static_cast<std::size_t>(i)][ridx]);
    }
    if (!derivatives) {
        return e;
    }

    // sens[i](r, j) = d x_r(i) / d u_j
    std::vector<Eigen::MatrixXd> sens(static_cast<std::size_t>(N) + 1,
                                      Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(nx), N));
    std::vector<ChunkDual> xd;
    std::vector<ChunkDual> dwork;
    for (int first = 0; first < N; first += kChunk) {
        const int count = std::min(kChunk, N - first);
        const auto& start = e.states[static_cast<std::size_t>(first)].vector();
        xd.assign(start.begin(), start.end());
        for (int i = first; i < N; ++i) {
            ChunkDual feed(u[i]);
            if (i - first < count) {
                feed.d[static_cast<std::size_t>(i - first)] = 1.0;
            }
            double ignored = 0.0;
            if (!detail::euler_advance<ChunkDual>(xd, feed, spec_.p_hat, fs, n_sub_, h, dwork,
                                                   ignored)) {
                throw NumericalError("nmpc sensitivity pass diverged; reduce h_sub_pred");
            }
            auto& S = sens[static_cast<std::size_t>(i) + 1];
            for (std::size_t r = 0; r < nx; ++r) {
                for (int c = 0; c < count; ++c) {
                    S(static_cast<Eigen::Index>(r), first + c) = xd[r].d[static_cast<std::size_t>(c)];
                }
            }
        }
    }

    e.gradient = Eigen::VectorXd::Zero(N);
    e.gauss_newton = Eigen::MatrixXd::Zero(N, N);
    for (int i = 1; i <= N; ++i) {
        const auto& wi = state_weight(i);
        const auto xs = e.states[static_cast<std::size_t>(i)].values();
        Eigen::VectorXd wdx(static_cast<Eigen::Index>(nx));
        Eigen::VectorXd wdiag(static_cast<Eigen::Index>(nx));
        for (std::size_t r = 0; r < nx; ++r) {
            wdx(static_cast<Eigen::Index>(r)) = wi[r] * (xs[r] - x_set_[r]);
            wdiag(static_cast<Eigen::Index>(r)) = wi[r];
        }
        const auto& S = sens[static_cast<std::size_t>(i)];
        e.gradient += 2.0 * S.transpose() * wdx;
        e.gauss_newton += 2.0 * S.transpose() * wdiag.asDiagonal() * S;
    }
    for (int i = 0; i < N; ++i) {
        const double prev = i == 0 ? spec_.u_prev : u[i - 1];
        e.gradient(i) += 2.0 * W.R * (u[i] - u_set) + 2.0 * W.S * (u[i] - prev);
        e.gauss_newton(i, i) += 2.0 * W.R + 2.0 * W.S;
        if (i + 1 < N) {
            e.gradient(i) -= 2.0 * W.S * (u[i + 1] - u[i]);
            e.gauss_newton(i, i) += 2.0 * W.S;
            e.gauss_newton(i, i + 1) -= 2.0 * W.S;
            e.gauss_newton(i + 1, i) -= 2.0 * W.S;
        }
    }

    e.raffinate_jacobian.resize(N, N);
    for (int i = 1; i <= N; ++i) {
        e.raffinate_jacobian.row(i - 1) =
            sens[static_cast<std::size_t>(i)].row(static_cast<Eigen::Index>(ridx));
    }
    return e;
}

double OcpProblem::merit(const ShootingEval& e) const
{
    double penalty = 0.0;
    for (double r : e.raffinate) {
        penalty += std::max(0.0, r - spec_.raffinate_tol);
    }
    return e.tracking + rho_ * penalty;
}

double OcpProblem::objective(std::span<const double> u) const { return merit(evaluate(u, false)); }

std::vector<double> OcpProblem::make_feasible(std::span<const double> u) const
{
    std::vector<double> out(u.begin(), u.end());
    double prev = spec_.u_prev;
    for (double& v : out) {
        v = spec_.bounds.clamp(v, prev);
        prev = v;
    }
    return out;
}

bool OcpProblem::feasible(std::span<const double> u, double tol) const
{
    const auto& b = spec_.bounds;
    double prev = spec_.u_prev;
    for (double v : u) {
        if (v < b.u_min - tol || v > b.u_max + tol || v - prev < b.du_min - tol ||
            v - prev > b.du_max + tol) {
            return false;
        }
        prev = v;
    }
    return true;
}

std::vector<double> shift_warm_start(std::span<const double> previous)
{
    std::vector<double> out;
    if (previous.empty()) {
        return out;
    }
    out.assign(previous.begin() + 1, previous.end());
    out.push_back(previous.back());
    return out;
}

namespace {

// Rows of the QP in z = (d, s):
//   [0, N)    r_i + Jr_i d - s_i <= tol
//   [N, 2N)   -s_i <= 0
//   [2N, 4N)  u + d <= u_max,  -(u + d) <= -u_min
//   [4N, 6N)  rate limits on successive inputs, the first against u_prev
DenseQp build_subproblem(const OcpProblem& prob, std::span<const double> u, const ShootingEval& e,
                         const Eigen::MatrixXd& hessian)
{
    const int N = prob.horizon();
    const auto& spec = prob.spec();
    const auto& b = spec.bounds;
    DenseQp qp;
    qp.H = Eigen::MatrixXd::Zero(2 * N, 2 * N);
    qp.H.topLeftCorner(N, N) = hessian;
    // A little curvature on the slacks keeps H definite. The slacks are pinned
    // by their rows whenever they are positive, so the solution is unchanged.
    const double eps = 1e-8 * hessian.diagonal().mean();
    qp.H.bottomRightCorner(N, N).diagonal().setConstant(eps);
    qp.c = Eigen::VectorXd::Zero(2 * N);
    qp.c.head(N) = e.gradient;
    qp.c.tail(N).setConstant(prob.rho());
    qp.G = Eigen::MatrixXd::Zero(6 * N, 2 * N);
    qp.h = Eigen::VectorXd::Zero(6 * N);
    for (int i = 0; i < N; ++i) {
        qp.G.block(i, 0, 1, N) = e.raffinate_jacobian.row(i);
        qp.G(i, N + i) = -1.0;
        qp.h(i) = spec.raffinate_tol - e.raffinate[static_cast<std::size_t>(i)];

        qp.G(N + i, N + i) = -1.0;

        qp.G(2 * N + i, i) = 1.0;
        qp.h(2 * N + i) = b.u_max - u[i];
        qp.G(3 * N + i, i) = -1.0;
        qp.h(3 * N + i) = u[i] - b.u_min;

        const double prev = i == 0 ? spec.u_prev : u[i - 1];
        qp.G(4 * N + i, i) = 1.0;
        qp.G(5 * N + i, i) = -1.0;
        if (i > 0) {
            qp.G(4 * N + i, i - 1) = -1.0;
            qp.G(5 * N + i, i - 1) = 1.0;
        }
        qp.h(4 * N + i) = b.du_max - (u[i] - prev);
        qp.h(5 * N + i) = (u[i] - prev) - b.du_min;
    }
    return qp;
}

// d = 0 with each slack at the current violation of its row.
Eigen::VectorXd feasible_start(const DenseQp& qp, int N)
{
    Eigen::VectorXd z = Eigen::VectorXd::Zero(2 * N);
    for (int i = 0; i < N; ++i) {
        z(N + i) = std::max(0.0, -qp.h(i));
    }
    return z;
}

// Gauss-Newton Hessian plus the raffinate-constraint curvature weighted by the
// multipliers, sum lam_i d2 r_i / du2, by forward differences of the exact
// constraint Jacobian. Without this term the iteration crawls whenever the
// penalty is active, because the multipliers are of order rho. The sum is
// projected onto the positive semidefinite cone so the QP stays convex.
Eigen::MatrixXd lagrangian_hessian(const OcpProblem& prob, std::span<const double> u,
                                   const ShootingEval& e, const Eigen::VectorXd& lam_r)
{
    const int N = prob.horizon();
    const Eigen::VectorXd base = e.raffinate_jacobian.transpose() * lam_r;
    Eigen::MatrixXd C(N, N);
    std::vector<double> up(u.begin(), u.end());
    for (int j = 0; j < N; ++j) {
        const auto jj = static_cast<std::size_t>(j);
        const double h = 1e-6 * std::max(1.0, std::abs(u[jj]));
        up[jj] = u[jj] + h;
        const ShootingEval ep = prob.evaluate(up, true);
        C.col(j) = (ep.raffinate_jacobian.transpose() * lam_r - base) / h;
        up[jj] = u[jj];
    }
    const Eigen::MatrixXd B = e.gauss_newton + 0.5 * (C + C.transpose());
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(B);
    const double floor = 1e-10 * std::max(1.0, e.gauss_newton.diagonal().maxCoeff());
    const Eigen::VectorXd values = eig.eigenvalues().cwiseMax(floor);
    return eig.eigenvectors() * values.asDiagonal() * eig.eigenvectors().transpose();
}

// First-order optimality of the slack-augmented problem at the current point,
// using the QP multipliers. Stationarity in u is scaled by the size of the
// terms it balances, stationarity in s by rho, complementarity by the largest
// multiplier.
double kkt_residual(const OcpProblem& prob, const DenseQp& qp, const Eigen::VectorXd& lam,
                    const ShootingEval& e)
{
    const int N = prob.horizon();
    const double tol = prob.spec().raffinate_tol;
    Eigen::VectorXd s_cur(N);
    for (int i = 0; i < N; ++i) {
        s_cur(i) = std::max(0.0, e.raffinate[static_cast<std::size_t>(i)] - tol);
    }
    Eigen::VectorXd z = Eigen::VectorXd::Zero(2 * N);
    z.tail(N) = s_cur;

    const Eigen::VectorXd constraint_force = qp.G.transpose() * lam;
    const Eigen::VectorXd stat = qp.c + constraint_force;
    const double scale_u = std::max({1.0, e.gradient.lpNorm<Eigen::Infinity>(),
                                     constraint_force.head(N).lpNorm<Eigen::Infinity>()});
    const double stat_u = stat.head(N).lpNorm<Eigen::Infinity>() / scale_u;
    const double stat_s = stat.tail(N).lpNorm<Eigen::Infinity>() / prob.rho();

    const Eigen::VectorXd slack = (qp.h - qp.G * z).cwiseMax(0.0);
    const double comp = lam.cwiseProduct(slack).lpNorm<Eigen::Infinity>() /
                        std::max(1.0, lam.lpNorm<Eigen::Infinity>());
    return std::max({stat_u, stat_s, comp});
}

}  // namespace

OcpSolution solve_ocp(const OcpProblem& problem,
                      const std::optional<std::vector<double>>& warm_start,
                      const SolverOptions& options)
{
    const int N = problem.horizon();
    const auto& spec = problem.spec();
    std::vector<double> u = warm_start && static_cast<int>(warm_start->size()) == N
                                ? problem.make_feasible(*warm_start)
                                : problem.make_feasible(std::vector<double>(
                                      static_cast<std::size_t>(N), spec.u_prev));

    OcpSolution sol;
    sol.status = OcpStatus::MaxIterations;
    ShootingEval e = problem.evaluate(u, true);
    double phi = problem.merit(e);

    // Raffinate multipliers from the previous subproblem.
    Eigen::VectorXd lam_r = Eigen::VectorXd::Zero(N);
    for (int it = 1; it <= options.max_iterations; ++it) {
        sol.iterations = it;
        const bool curved = lam_r.maxCoeff() > 1e-6 * problem.rho();
        const DenseQp qp = build_subproblem(
            problem, u, e, curved ? lagrangian_hessian(problem, u, e, lam_r) : e.gauss_newton);
        const QpResult qr = solve_qp(qp, feasible_start(qp, N));
        lam_r = qr.multipliers.head(N);
        sol.kkt_residual = kkt_residual(problem, qp, qr.multipliers, e);
        if (sol.kkt_residual < options.kkt_tolerance) {
            sol.status = OcpStatus::Optimal;
            break;
        }

        const Eigen::VectorXd d = qr.z.head(N);
        // Decrease of the linearized exact-penalty model along d, summed term by
        // term so that it survives a large penalty value.
        double predicted = -e.gradient.dot(d);
        for (int i = 0; i < N; ++i) {
            const auto ii = static_cast<std::size_t>(i);
            const double r_lin = e.raffinate[ii] + e.raffinate_jacobian.row(i).dot(d);
            predicted += problem.rho() * (std::max(0.0, e.raffinate[ii] - spec.raffinate_tol) -
                                          std::max(0.0, r_lin - spec.raffinate_tol));
        }
        if (!(predicted > 0.0)) {
            if (curved) {
                lam_r.setZero();
                continue;
            }
            sol.status = OcpStatus::LineSearchFailure;
            break;
        }

        auto try_point = [&](std::vector<double> trial, double decrease) {
            trial = problem.make_feasible(trial);
            const ShootingEval et = problem.evaluate(trial, false);
            // The penalty term dominates phi when the start is infeasible, so
            // allow for rounding in phi itself.
            const double noise = 8.0 * std::numeric_limits<double>::epsilon() * std::abs(phi);
            if (problem.merit(et) <= phi - 1e-4 * decrease + noise) {
                u = std::move(trial);
                return true;
            }
            return false;
        };
        auto step_to = [&](const Eigen::VectorXd& dir, double alpha) {
            std::vector<double> trial(u);
            for (int i = 0; i < N; ++i) {
                trial[static_cast<std::size_t>(i)] += alpha * dir(i);
            }
            return trial;
        };

        bool accepted = try_point(step_to(d, 1.0), predicted);
        if (!accepted) {
            // Second-order correction: shift the linearized raffinate rows by the
            // curvature seen at the full step and re-solve.
            const ShootingEval ef = problem.evaluate(problem.make_feasible(step_to(d, 1.0)), false);
            DenseQp soc = qp;
            const Eigen::VectorXd lin = e.raffinate_jacobian * d;
            for (int i = 0; i < N; ++i) {
                const auto ii = static_cast<std::size_t>(i);
                soc.h(i) -= ef.raffinate[ii] - e.raffinate[ii] - lin(i);
            }
            const QpResult qs = solve_qp(soc, feasible_start(soc, N));
            if (qs.converged) {
                accepted = try_point(step_to(qs.z.head(N), 1.0), predicted);
            }
        }
        double alpha = 0.5;
        for (int k = 1; !accepted && k < 40; ++k, alpha *= 0.5) {
            accepted = try_point(step_to(d, alpha), alpha * predicted);
        }
        if (!accepted && curved) {
            // Retry the iteration on the Gauss-Newton model.
            lam_r.setZero();
            continue;
        }
        if (!accepted) {
            sol.status = OcpStatus::LineSearchFailure;
            break;
        }
        e = problem.evaluate(u, true);
        phi = problem.merit(e);
    }

    sol.u_star = u;
    sol.predicted = e.states;
    sol.objective = phi;
    for (double r : e.raffinate) {
        sol.slacks.push_back(std::max(0.0, r - spec.raffinate_tol));
    }
    return sol;
}

MpcWeights MpcOptions::weights_for(int n_states, double u_set) const
{
    MpcWeights w = MpcWeights::standard(n_states, u_set);
    std::fill(w.Q.begin(), w.Q.end(), q_scale);
    std::fill(w.P.begin(), w.P.end(), p_scale);
    if (R) {
        w.R = *R;
    }
    if (S) {
        w.S = *S;
    }
    return w;
}

MpcStepResult mpc_step(const CascadeState& x_k, double u_prev, const SetPoint& setpoint,
                       double p_now, const FlowSheet& fs, const MpcOptions& options,
                       const std::optional<std::vector<double>>& warm_start)
{
    OcpSpec spec;
    spec.x_k = x_k;
    spec.u_prev = u_prev;
    spec.setpoint = setpoint;
    spec.p_hat = p_now;
    spec.horizon = options.horizon;
    spec.T_s = options.T_s;
    spec.h_sub = options.h_sub_pred;
    spec.weights = options.weights_for(static_cast<int>(x_k.size()), setpoint.u_set);
    spec.bounds = InputBounds::from(fs);
    spec.raffinate_tol = fs.raffinate_tol;
    spec.rho = options.rho;

    const OcpProblem problem = build_ocp(spec, fs);
    MpcStepResult out;
    out.solution = solve_ocp(problem, warm_start, options.solver);
    out.u_applied = spec.bounds.clamp(out.solution.u_star.front(), u_prev);
    return out;
}

}  // namespace uranex
