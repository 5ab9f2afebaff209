#include "uranex/steady_state.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include <Eigen/Dense>

namespace uranex {

namespace {

double max_abs(const std::vector<double>& v)
{
    double m = 0.0;
    for (double e : v) {
        m = std::max(m, std::abs(e));
    }
    return std::isfinite(m) ? m : INFINITY;
}

double norm2(const std::vector<double>& v)
{
    double s = 0.0;
    for (double e : v) {
        s += e * e;
    }
    return std::isfinite(s) ? std::sqrt(s) : INFINITY;
}

struct NewtonResult {
    CascadeState x;
    double residual = INFINITY;
    int iterations = 0;
    bool converged = false;
};

void fd_jacobian(const CascadeState& x, const std::vector<double>& f, Inputs inp,
                 const FlowSheet& fs, Eigen::MatrixXd& jac)
{
    const auto n = static_cast<Eigen::Index>(x.size());
    jac.resize(n, n);
    CascadeState probe = x;
    for (Eigen::Index c = 0; c < n; ++c) {
        const auto ci = static_cast<std::size_t>(c);
        const double h = 1e-7 * std::max(1.0, std::abs(x[ci]));
        probe[ci] = x[ci] + h;
        const auto fp = rhs(probe, inp, fs);
        for (Eigen::Index r = 0; r < n; ++r) {
            jac(r, c) = (fp[static_cast<std::size_t>(r)] - f[static_cast<std::size_t>(r)]) / h;
        }
        probe[ci] = x[ci];
    }
}

// Largest step in (0, 1] that shrinks no positive component by more than 95 %.
// Concentrations below the feed stage fall off geometrically, so a full
// Newton step would otherwise be projected onto zero and lose that profile.
double fraction_to_boundary(const CascadeState& x, const Eigen::VectorXd& dir)
{
    double lambda = 1.0;
    for (Eigen::Index i = 0; i < dir.size(); ++i) {
        const double xi = x[static_cast<std::size_t>(i)];
        if (dir(i) < 0.0 && xi > 0.0) {
            lambda = std::min(lambda, 0.95 * xi / -dir(i));
        }
    }
    return lambda;
}

CascadeState advance(const CascadeState& x, const Eigen::VectorXd& dir, double lambda)
{
    CascadeState trial = x;
    for (Eigen::Index i = 0; i < dir.size(); ++i) {
        const auto ii = static_cast<std::size_t>(i);
        trial[ii] = std::max(0.0, x[ii] + lambda * dir(i));
    }
    return trial;
}

// Damped Newton with the affine-invariant monotonicity test: a step of length
// lambda is accepted when the simplified Newton correction at the trial point,
// computed with the current factorization, is shorter than (1 - lambda/4)
// times the ordinary correction. Residual norms are a poor merit function
// here because the slow inventory mode barely shows in them. Iterates stay
// nonnegative and no positive component may shrink by more than 95 % per step.
NewtonResult newton(CascadeState x, Inputs inp, const FlowSheet& fs, const SteadyStateOptions& opt)
{
    Eigen::MatrixXd jac;
    std::vector<double> f = rhs(x, inp, fs);
    NewtonResult res{x, max_abs(f), 0, false};
    if (res.residual < opt.tolerance) {
        res.converged = true;
        return res;
    }

    double lambda_prev = 1.0;
    for (int it = 1; it <= opt.max_newton_iterations; ++it) {
        fd_jacobian(x, f, inp, fs, jac);
        const auto n = jac.rows();
        const Eigen::PartialPivLU<Eigen::MatrixXd> lu(jac);
        const Eigen::VectorXd dir = lu.solve(-Eigen::Map<const Eigen::VectorXd>(f.data(), n));
        if (!dir.allFinite()) {
            break;
        }
        const double dir_norm = dir.norm();

        double lambda = std::min({1.0, 2.0 * lambda_prev, fraction_to_boundary(x, dir)});
        bool accepted = false;
        for (int halving = 0; halving <= 30; ++halving, lambda *= 0.5) {
            auto trial = advance(x, dir, lambda);
            auto ft = rhs(trial, inp, fs);
            if (max_abs(ft) < opt.tolerance) {
                x = std::move(trial);
                f = std::move(ft);
                accepted = true;
                break;
            }
            const Eigen::VectorXd simplified =
                lu.solve(-Eigen::Map<const Eigen::VectorXd>(ft.data(), n));
            if (simplified.allFinite() && simplified.norm() <= (1.0 - 0.25 * lambda) * dir_norm) {
                x = std::move(trial);
                f = std::move(ft);
                accepted = true;
                break;
            }
        }
        res.iterations = it;
        if (!accepted) {
            break;
        }
        lambda_prev = lambda;
        const double r = max_abs(f);
        if (r < res.residual) {
            res.residual = r;
            res.x = x;
        }
        if (r < opt.tolerance) {
            res.converged = true;
            return res;
        }
    }
    return res;
}

// Pseudo-transient continuation: backward-Euler steps (I/dt - J) dx = f with
// dt grown by the residual ratio, so the iteration follows the stable
// dynamics early and turns into Newton as dt grows. Used when plain Newton
// stalls near the saturation knee, where the slowest mode is too slow for
// explicit integration to settle.
NewtonResult pseudo_transient(CascadeState x, Inputs inp, const FlowSheet& fs,
                              const SteadyStateOptions& opt, double& pseudo_time)
{
    Eigen::MatrixXd jac;
    std::vector<double> f = rhs(x, inp, fs);
    NewtonResult res{x, max_abs(f), 0, false};
    double dt = opt.initial_pseudo_step;
    for (int it = 1; it <= opt.max_pseudo_steps; ++it) {
        res.iterations = it;
        fd_jacobian(x, f, inp, fs, jac);
        const auto n = jac.rows();
        const Eigen::Map<const Eigen::VectorXd> fv(f.data(), n);
        Eigen::MatrixXd lhs = -jac;
        lhs.diagonal().array() += 1.0 / dt;
        const Eigen::VectorXd dir = lhs.partialPivLu().solve(fv);
        auto trial = advance(x, dir, 1.0);
        auto ft = rhs(trial, inp, fs);
        const double old_norm = norm2(f);
        const double new_norm = norm2(ft);
        if (!dir.allFinite() || !std::isfinite(new_norm) || new_norm > 10.0 * old_norm) {
            dt *= 0.25;
            continue;
        }
        pseudo_time += dt;
        x = std::move(trial);
        f = std::move(ft);
        dt *= std::clamp(old_norm / new_norm, 0.5, 10.0);
        const double r = max_abs(f);
        if (r < res.residual) {
            res.residual = r;
            res.x = x;
        }
        if (r < opt.tolerance) {
            res.converged = true;
            return res;
        }
    }
    return res;
}

// Natural-parameter continuation in the feed flow from a converged anchor
// (u_from, x_from) to u_to, with a secant predictor and step halving on
// failure. The steady branch is smooth through the saturation knee even
// where Newton from a distant guess is not.
NewtonResult continuation(double u_from, CascadeState x_from, double u_to, double p,
                          const FlowSheet& fs, const SteadyStateOptions& opt, int& iterations)
{
    double u = u_from;
    CascadeState x = std::move(x_from);
    std::optional<CascadeState> x_prev;
    double du_prev = 0.0;
    double du = (u_to - u_from) / 8.0;
    const double du_min = 1e-7 * std::max(1.0, std::abs(u_to));
    NewtonResult last{x, INFINITY, 0, false};
    while (u != u_to) {
        if (std::abs(du) < du_min) {
            return last;
        }
        const bool final_step = std::abs(u_to - u) <= std::abs(du);
        const double u_next = final_step ? u_to : u + du;
        CascadeState pred = x;
        if (x_prev) {
            const double ratio = (u_next - u) / du_prev;
            for (std::size_t i = 0; i < pred.size(); ++i) {
                pred[i] = std::max(0.0, x[i] + ratio * (x[i] - (*x_prev)[i]));
            }
        }
        auto nr = newton(pred, {u_next, p}, fs, opt);
        iterations += nr.iterations;
        if (!nr.converged) {
            du *= 0.5;
            continue;
        }
        x_prev = std::move(x);
        x = nr.x;
        du_prev = u_next - u;
        u = u_next;
        last = std::move(nr);
        if (last.iterations <= 4) {
            du *= 1.5;
        }
    }
    return last;
}

CascadeState integrate(CascadeState x, Inputs inp, const FlowSheet& fs, double hours, double h_sub)
{
    const int n_sub = std::max(1, static_cast<int>(std::lround(hours / h_sub)));
    std::vector<double> values = x.vector();
    std::vector<double> work;
    double clamped = 0.0;
    if (!detail::euler_advance<double>(values, inp.feed, inp.solvent, fs, n_sub, h_sub, work,
                                       clamped)) {
        throw NumericalError("steady_state: integration diverged; reduce h_sub");
    }
    return {x.n_stages(), std::move(values)};
}

SteadyPoint make_point(double u, double p, const NewtonResult& nr, int iterations, double hours)
{
    SteadyPoint sp;
    sp.u = u;
    sp.p = p;
    sp.x_ss = nr.x;
    sp.raffinate_U = nr.x.raffinate();
    sp.loaded_U = nr.x.loaded();
    sp.residual = nr.residual;
    sp.newton_iterations = iterations;
    sp.integrated_hours = hours;
    return sp;
}

}  // namespace

SteadyPoint steady_state(double u, double p, const FlowSheet& fs,
                         const std::optional<CascadeState>& x_guess,
                         const SteadyStateOptions& options)
{
    if (!(u >= 0.0) || !(p > 0.0)) {
        throw std::invalid_argument("steady_state: requires u >= 0 and p > 0");
    }
    const Inputs inp{u, p};
    double hours = 0.0;
    CascadeState x;
    if (x_guess) {
        if (x_guess->n_stages() != fs.n_stages) {
            throw std::invalid_argument("steady_state: guess does not match flowsheet");
        }
        x = *x_guess;
    } else {
        x = integrate(CascadeState(fs.n_stages), inp, fs, options.seed_hours, options.h_sub);
        hours = options.seed_hours;
    }

    auto nr = newton(x, inp, fs, options);
    if (nr.converged) {
        return make_point(u, p, nr, nr.iterations, hours);
    }
    int newton_iterations = nr.iterations;

    // Anchor well below the requested feed, where a cold start converges,
    // then follow the branch up to u.
    for (double u_anchor = 0.5 * u; u_anchor > 1e-3 * u; u_anchor *= 0.5) {
        const CascadeState seed =
            integrate(CascadeState(fs.n_stages), {u_anchor, p}, fs, options.seed_hours, options.h_sub);
        auto anchor = newton(seed, {u_anchor, p}, fs, options);
        newton_iterations += anchor.iterations;
        hours += options.seed_hours;
        if (!anchor.converged) {
            continue;
        }
        auto cont = continuation(u_anchor, anchor.x, u, p, fs, options, newton_iterations);
        if (cont.converged) {
            return make_point(u, p, cont, newton_iterations, hours);
        }
        break;
    }

    double pseudo_time = 0.0;
    auto pt = pseudo_transient(nr.x, inp, fs, options, pseudo_time);
    if (pt.converged) {
        return make_point(u, p, pt, newton_iterations + pt.iterations, hours + pseudo_time);
    }
    std::ostringstream msg;
    msg << "steady_state: no convergence at u=" << u << ", p=" << p << " (best residual "
        << std::min(nr.residual, pt.residual) << ")";
    throw NumericalError(msg.str());
}

std::vector<SteadyPoint> sweep_feed(std::span<const double> u_grid, double p, const FlowSheet& fs,
                                    const SteadyStateOptions& options)
{
    if (!std::is_sorted(u_grid.begin(), u_grid.end())) {
        throw std::invalid_argument("sweep_feed: grid must be sorted ascending");
    }
    std::vector<SteadyPoint> points;
    points.reserve(u_grid.size());
    std::optional<CascadeState> guess;
    for (double u : u_grid) {
        points.push_back(steady_state(u, p, fs, guess, options));
        guess = points.back().x_ss;
    }
    return points;
}

SetPoint critical_setpoint(double p, const FlowSheet& fs, double u_lo, double u_hi,
                           const SetPointOptions& options)
{
    if (!(u_lo < u_hi) || !(options.margin > 0.0) || !(options.margin <= 1.0)) {
        throw std::invalid_argument("critical_setpoint: need u_lo < u_hi and margin in (0, 1]");
    }
    const double tol = fs.raffinate_tol;
    auto lo = steady_state(u_lo, p, fs, std::nullopt, options.steady);
    if (lo.raffinate_U > tol) {
        std::ostringstream msg;
        msg << "critical_setpoint: raffinate at u_lo=" << u_lo << " already exceeds tolerance";
        throw NumericalError(msg.str());
    }

    double u_critical = u_hi;
    auto hi = steady_state(u_hi, p, fs, std::nullopt, options.steady);
    if (hi.raffinate_U > tol) {
        const double width = options.relative_width * (u_hi - u_lo);
        double a = u_lo;
        double b = u_hi;
        while (b - a > width) {
            const double mid = 0.5 * (a + b);
            auto sp = steady_state(mid, p, fs, lo.x_ss, options.steady);
            if (sp.raffinate_U <= tol) {
                a = mid;
                lo = std::move(sp);
            } else {
                b = mid;
            }
        }
        u_critical = a;
    }

    SetPoint set;
    set.p = p;
    set.u_critical = u_critical;
    set.u_set = options.margin * u_critical;
    set.x_set = steady_state(set.u_set, p, fs, lo.x_ss, options.steady).x_ss;
    return set;
}

}  // namespace uranex
