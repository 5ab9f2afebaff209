#include "uranex/equilibrium.hpp"

#include <stdexcept>

namespace uranex {

EquilibriumResult solve_equilibrium(AqueousPoint pt, double tbp_total, double K_U, double K_H)
{
    if (!(pt.U_aq >= 0.0) || !(pt.H_aq >= 0.0) || !(tbp_total > 0.0) || !(K_U >= 0.0) ||
        !(K_H >= 0.0)) {
        throw std::invalid_argument("solve_equilibrium: concentrations and constants must be >= 0");
    }
    EquilibriumResult r;
    r.NO3 = nitrate(pt.U_aq, pt.H_aq);
    const double u_coef = K_U * pt.U_aq * r.NO3 * r.NO3;
    const double h_coef = K_H * pt.H_aq * r.NO3;
    r.TBP_free = detail::free_tbp(2.0 * u_coef, 1.0 + h_coef, tbp_total);
    r.U_og_star = u_coef * r.TBP_free * r.TBP_free;
    r.H_og_star = h_coef * r.TBP_free;
    return r;
}

}  // namespace uranex
