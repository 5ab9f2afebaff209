#pragma once

#include <optional>
#include <span>
#include <vector>

#include "uranex/cascade.hpp"
#include "uranex/flowsheet.hpp"

namespace uranex {

struct SteadyStateOptions {
    double tolerance = 1e-9;     // on max |rhs|, mol/L/h
    int max_newton_iterations = 50;
    double seed_hours = 200.0;   // cold-start integration before Newton
    double h_sub = 1e-3;
    // Fallback when Newton stalls: implicit pseudo-time stepping.
    int max_pseudo_steps = 400;
    double initial_pseudo_step = 1.0;  // h
};

struct SteadyPoint {
    double u = 0.0;
    double p = 0.0;
    CascadeState x_ss;
    double raffinate_U = 0.0;  // [U]aq_D,1
    double loaded_U = 0.0;     // [U]og_D,n
    double residual = 0.0;     // max |rhs| at x_ss
    int newton_iterations = 0;
    double integrated_hours = 0.0;
};

/**
 * Steady state at fixed (u, p). Damped Newton on rhs(x) = 0 seeded by
 * x_guess, or by integrating from an empty cascade when no guess is given.
 * When Newton stalls the state is integrated onward with implicit pseudo-time
 * steps whose length grows as the residual falls. Throws NumericalError
 * carrying the best residual.
 */
SteadyPoint steady_state(double u, double p, const FlowSheet& fs,
                         const std::optional<CascadeState>& x_guess = std::nullopt,
                         const SteadyStateOptions& options = {});

/// One steady point per grid entry, each seeded by its predecessor.
std::vector<SteadyPoint> sweep_feed(std::span<const double> u_grid, double p, const FlowSheet& fs,
                                    const SteadyStateOptions& options = {});

struct SetPoint {
    double u_set = 0.0;
    CascadeState x_set;
    double p = 0.0;
    double u_critical = 0.0;  // raffinate-tolerance crossing before the margin

    [[nodiscard]] double y_set() const { return x_set.loaded(); }
};

struct SetPointOptions {
    double margin = 0.98;          // u_set = margin * u_critical
    double relative_width = 1e-3;  // bisection stops at this fraction of the interval
    SteadyStateOptions steady;
};

/**
 * Critical feed flow A_F* for solvent flow p: the largest u in [u_lo, u_hi]
 * whose steady raffinate stays within fs.raffinate_tol, located by bisection
 * and then shrunk by the safety margin. If even u_hi satisfies the tolerance
 * the result is margin * u_hi. Throws NumericalError if u_lo already violates it.
 */
SetPoint critical_setpoint(double p, const FlowSheet& fs, double u_lo, double u_hi,
                           const SetPointOptions& options = {});

}  // namespace uranex
