#include "uranex/pid.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include <gsl/gsl_errno.h>
#include <gsl/gsl_multimin.h>

namespace uranex {

PidOutput pid_step(const PidState& st, const PidGains& gains, double y, double y_set,
                   double u_set, const InputBounds& bounds)
{
    PidOutput out;
    const double e = y_set - y;
    out.state = st;
    out.state.e_I = 0.5 * st.T * (e + st.e_prev) + st.e_I;
    const double e_D = (e - st.e_prev) / st.T;
    const double raw = u_set + gains.K_P * e + gains.K_I * out.state.e_I + gains.K_D * e_D;
    out.u = bounds.clamp(raw, st.u_prev);
    out.state.e_prev = e;
    out.state.u_prev = out.u;
    return out;
}

PidRollout pid_rollout(const PidTuningProblem& prob, const PidGains& gains, const FlowSheet& fs)
{
    const double u_set = prob.setpoint.u_set;
    const double y_set = prob.setpoint.y_set();
    const double r = prob.r > 0.0 ? prob.r : 1.0 / (u_set * u_set);
    const double s = prob.s > 0.0 ? prob.s : 1.0 / (u_set * u_set);
    const int n_sub = substep_count(prob.T_s, prob.h_sub);
    const double h = prob.T_s / n_sub;
    const auto bounds = InputBounds::from(fs);

    PidRollout ro;
    PidState st;
    st.u_prev = prob.u_prev;
    st.T = prob.T_s;
    std::vector<double> x = prob.x0.vector();
    std::vector<double> work;
    double clamped = 0.0;
    const auto yi = loaded_index(fs.n_stages);
    for (int k = 0; k <= prob.steps; ++k) {
        const double y = x[yi];
        const auto out = pid_step(st, gains, y, y_set, u_set, bounds);
        st = out.state;
        ro.y.push_back(y);
        ro.u.push_back(out.u);
        if (k == prob.steps) {
            break;
        }
        if (!detail::euler_advance<double>(x, out.u, prob.p, fs, n_sub, h, work, clamped)) {
            throw NumericalError("pid rollout diverged", k);
        }
    }
    for (int k = 0; k < prob.steps; ++k) {
        const auto kk = static_cast<std::size_t>(k);
        const double e = y_set - ro.y[kk];
        const double du = ro.u[kk] - u_set;
        const double move = ro.u[kk + 1] - ro.u[kk];
        ro.objective += e * e + r * du * du + s * move * move;
    }
    return ro;
}

namespace {

struct Callback {
    const PidTuningProblem* prob;
    const FlowSheet* fs;
};

double objective_cb(const gsl_vector* v, void* params)
{
    const auto* cb = static_cast<const Callback*>(params);
    const PidGains g{gsl_vector_get(v, 0), gsl_vector_get(v, 1), gsl_vector_get(v, 2)};
    try {
        const double f = pid_rollout(*cb->prob, g, *cb->fs).objective;
        return std::isfinite(f) ? f : GSL_POSINF;
    } catch (const NumericalError&) {
        return GSL_POSINF;
    }
}

TuneStart run_start(const PidGains& start, const Callback& cb, const TuneOptions& opt,
                    std::vector<double>& trace)
{
    TuneStart ts;
    ts.initial = start;
    ts.initial_objective = pid_rollout(*cb.prob, start, *cb.fs).objective;
    ts.tuned = start;
    ts.tuned_objective = ts.initial_objective;
    trace.assign(1, ts.initial_objective);

    gsl_multimin_function fn{&objective_cb, 3, const_cast<Callback*>(&cb)};
    gsl_vector* x = gsl_vector_alloc(3);
    gsl_vector* step = gsl_vector_alloc(3);
    gsl_vector_set(x, 0, start.K_P);
    gsl_vector_set(x, 1, start.K_I);
    gsl_vector_set(x, 2, start.K_D);
    gsl_vector_set(step, 0, opt.scale.K_P);
    gsl_vector_set(step, 1, opt.scale.K_I);
    gsl_vector_set(step, 2, opt.scale.K_D);
    gsl_multimin_fminimizer* mm = gsl_multimin_fminimizer_alloc(gsl_multimin_fminimizer_nmsimplex2, 3);

    const double size_tol = opt.size_tolerance *
                            std::max({opt.scale.K_P, opt.scale.K_I, opt.scale.K_D});
    if (gsl_multimin_fminimizer_set(mm, &fn, x, step) == GSL_SUCCESS) {
        for (int it = 1; it <= opt.max_iterations; ++it) {
            ts.iterations = it;
            if (gsl_multimin_fminimizer_iterate(mm) != GSL_SUCCESS) {
                break;
            }
            trace.push_back(std::min(trace.back(), gsl_multimin_fminimizer_minimum(mm)));
            if (gsl_multimin_test_size(gsl_multimin_fminimizer_size(mm), size_tol) == GSL_SUCCESS) {
                break;
            }
        }
        const double f = gsl_multimin_fminimizer_minimum(mm);
        if (f < ts.tuned_objective) {
            const gsl_vector* best = gsl_multimin_fminimizer_x(mm);
            ts.tuned = {gsl_vector_get(best, 0), gsl_vector_get(best, 1), gsl_vector_get(best, 2)};
            ts.tuned_objective = f;
        }
    }
    gsl_multimin_fminimizer_free(mm);
    gsl_vector_free(step);
    gsl_vector_free(x);
    return ts;
}

}  // namespace

TuneResult tune_pid(const FlowSheet& fs, const PidTuningProblem& prob, const PidGains& initial,
                    const TuneOptions& options)
{
    if (options.starts < 1 || options.max_iterations < 1) {
        throw std::invalid_argument("tune_pid: need at least one start and one iteration");
    }
    if (!(options.scale.K_P > 0.0) || !(options.scale.K_I > 0.0) || !(options.scale.K_D > 0.0)) {
        throw std::invalid_argument("tune_pid: gain scales must be > 0");
    }
    const Callback cb{&prob, &fs};
    gsl_error_handler_t* previous = gsl_set_error_handler_off();

    TuneResult res;
    res.seed = options.seed;
    res.baseline_objective = pid_rollout(prob, PidGains{}, fs).objective;
    std::mt19937_64 rng(options.seed);
    std::uniform_real_distribution<double> unit(0.0, 2.0);
    std::vector<double> trace;
    for (int i = 0; i < options.starts; ++i) {
        PidGains start = initial;
        if (i > 0) {
            start = {options.scale.K_P * unit(rng), options.scale.K_I * unit(rng),
                     options.scale.K_D * unit(rng)};
        }
        auto ts = run_start(start, cb, options, trace);
        if (res.starts.empty() || ts.tuned_objective < res.objective) {
            res.gains = ts.tuned;
            res.objective = ts.tuned_objective;
            res.trace = trace;
        }
        res.starts.push_back(ts);
    }
    gsl_set_error_handler(previous);
    res.improved = res.objective < res.baseline_objective;
    return res;
}

}  // namespace uranex
