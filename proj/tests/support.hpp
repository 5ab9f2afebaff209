#pragma once

#include "uranex/flowsheet.hpp"
#include "uranex/steady_state.hpp"

namespace uranex::test {

/// Shipped reference flowsheet (path baked in at configure time).
inline const FlowSheet& reference()
{
    static const FlowSheet fs = load_flowsheet(URANEX_REFERENCE_CONFIG);
    return fs;
}

inline const SetPoint& nominal_setpoint()
{
    static const SetPoint sp =
        critical_setpoint(reference().O_E_nominal, reference(), reference().u_min, reference().u_max);
    return sp;
}

/// Uranium-free steady state at the nominal set point (Case A start).
inline const CascadeState& uranium_free_start()
{
    static const CascadeState x = [] {
        FlowSheet blank = reference();
        blank.U_feed = 0.0;
        return steady_state(nominal_setpoint().u_set, blank.O_E_nominal, blank).x_ss;
    }();
    return x;
}

}  // namespace uranex::test
