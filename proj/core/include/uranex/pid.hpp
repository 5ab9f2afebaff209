#pragma once

#include <cstdint>
#include <vector>

#include "uranex/cascade.hpp"
#include "uranex/nmpc.hpp"
#include "uranex/steady_state.hpp"

namespace uranex {

/// Gains mapping the loaded-solvent error (mol/L) to feed flow (L/h).
struct PidGains {
    double K_P = 0.0;
    double K_I = 0.0;
    double K_D = 0.0;

    bool operator==(const PidGains&) const = default;
};

struct PidState {
    double e_prev = 0.0;
    double e_I = 0.0;     // trapezoidal integral, mol h / L
    double u_prev = 0.0;  // last applied input
    double T = 0.5;       // sampling interval, h
};

struct PidOutput {
    double u = 0.0;
    PidState state;
};

/**
 * One controller update on y = [U]og_D,n. The raw output
 * u_set + K_P e + K_I e_I + K_D (e - e_prev) / T is clamped to the box and
 * then to the rate window around the previously applied input; the stored
 * u_prev is the clamped value.
 */
PidOutput pid_step(const PidState& st, const PidGains& gains, double y, double y_set,
                   double u_set, const InputBounds& bounds);

/// Closed-loop problem the tuner simulates.
struct PidTuningProblem {
    CascadeState x0;
    SetPoint setpoint;
    double p = 0.0;          // solvent flow, held constant
    double u_prev = 0.0;     // input applied before the first step
    int steps = 30;          // N_PID
    double T_s = 0.5;
    double h_sub = 1e-3;
    double r = 0.0;          // weight on (u - u_set)^2; <= 0 selects 1 / u_set^2
    double s = 0.0;          // weight on input moves;   <= 0 selects 1 / u_set^2
};

struct PidRollout {
    std::vector<double> u;  // steps + 1 applied inputs
    std::vector<double> y;  // steps + 1 outputs, y[0] from x0
    double objective = 0.0;
};

/// Simulate the clamped PID loop from x0 and evaluate the tuning objective.
PidRollout pid_rollout(const PidTuningProblem& prob, const PidGains& gains, const FlowSheet& fs);

struct TuneOptions {
    int starts = 6;                   // first start is the initial gains, the rest are random
    std::uint64_t seed = 20240611;
    int max_iterations = 400;         // simplex iterations per start
    double size_tolerance = 1e-4;     // simplex size at convergence, relative to the gain scale
    PidGains scale{40.0, 20.0, 4.0};  // initial simplex steps and random-start ranges
};

struct TuneStart {
    PidGains initial;
    double initial_objective = 0.0;
    PidGains tuned;
    double tuned_objective = 0.0;
    int iterations = 0;
};

struct TuneResult {
    PidGains gains;
    double objective = 0.0;
    double baseline_objective = 0.0;  // zero gains, i.e. open loop at u_set
    std::vector<TuneStart> starts;
    std::vector<double> trace;        // best objective after each simplex iteration of the winning start
    std::uint64_t seed = 0;
    bool improved = false;            // some start beat the zero-gain baseline
};

/**
 * Offline gain tuning: Nelder-Mead from several starts on the closed-loop
 * objective sum e^2 + r (u - u_set)^2 + s (u(k+1) - u(k))^2. Each start
 * returns the best of its start point and its simplex result.
 */
TuneResult tune_pid(const FlowSheet& fs, const PidTuningProblem& prob, const PidGains& initial,
                    const TuneOptions& options = {});

}  // namespace uranex
