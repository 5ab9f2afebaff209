#pragma once

#include <cmath>

namespace uranex {

/// Aqueous mixer concentrations, mol/L.
struct AqueousPoint {
    double U_aq = 0.0;
    double H_aq = 0.0;
};

struct EquilibriumResult {
    double NO3 = 0.0;
    double TBP_free = 0.0;
    double U_og_star = 0.0;
    double H_og_star = 0.0;
};

/// Total aqueous nitrate carried by uranyl nitrate and nitric acid.
template <class T>
T nitrate(const T& U_aq, const T& H_aq)
{
    return 2.0 * U_aq + H_aq;
}

namespace detail {

/// Below this ratio a / (b^2 / TBP_total) the free-TBP quadratic is treated as linear.
inline constexpr double kLinearBranchRatio = 1e-14;

/**
 * Free TBP from the TBP balance
 *   TBP_total = T + 2 K_U U NO3^2 T^2 + K_H H NO3 T,
 * i.e. the positive root of a T^2 + b T - TBP_total = 0, written in the
 * cancellation-free form 2 TBP / (b + sqrt(b^2 + 4 a TBP)).
 */
template <class T>
T free_tbp(const T& a, const T& b, double tbp_total)
{
    using std::sqrt;
    if (a < kLinearBranchRatio * (b * b / tbp_total)) {
        return tbp_total / b;
    }
    return (2.0 * tbp_total) / (b + sqrt(b * b + 4.0 * tbp_total * a));
}

}  // namespace detail

/// Equilibrium organic concentrations in a mixer; generic over the scalar so
/// that the cascade dynamics can be differentiated.
template <class T>
struct OrganicEquilibrium {
    T U_og;
    T H_og;
};

template <class T>
OrganicEquilibrium<T> equilibrium_organic(const T& U_aq, const T& H_aq, double tbp_total,
                                          double K_U, double K_H)
{
    const T no3 = nitrate(U_aq, H_aq);
    const T u_coef = K_U * U_aq * no3 * no3;  // U_og* = u_coef * T^2
    const T h_coef = K_H * H_aq * no3;        // H_og* = h_coef * T
    const T tbp_free = detail::free_tbp<T>(2.0 * u_coef, 1.0 + h_coef, tbp_total);
    return {u_coef * tbp_free * tbp_free, h_coef * tbp_free};
}

EquilibriumResult solve_equilibrium(AqueousPoint pt, double tbp_total, double K_U, double K_H);

}  // namespace uranex
