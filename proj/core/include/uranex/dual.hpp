#pragma once

#include <array>
#include <cmath>

namespace uranex {

/**
 * Forward-mode dual number carrying N directional derivatives.
 *
 * Only the operations used by the cascade right-hand side are provided.
 */
template <int N>
struct Dual {
    double v = 0.0;
    std::array<double, N> d{};

    Dual() = default;
    Dual(double value) : v(value) {}  // NOLINT(google-explicit-constructor)

    static Dual variable(double value, int direction)
    {
        Dual r(value);
        r.d[direction] = 1.0;
        return r;
    }

    Dual& operator+=(const Dual& o)
    {
        v += o.v;
        for (int i = 0; i < N; ++i) d[i] += o.d[i];
        return *this;
    }
    Dual& operator-=(const Dual& o)
    {
        v -= o.v;
        for (int i = 0; i < N; ++i) d[i] -= o.d[i];
        return *this;
    }
    Dual& operator*=(const Dual& o)
    {
        for (int i = 0; i < N; ++i) d[i] = d[i] * o.v + v * o.d[i];
        v *= o.v;
        return *this;
    }
    Dual& operator/=(const Dual& o)
    {
        const double inv = 1.0 / o.v;
        v *= inv;
        for (int i = 0; i < N; ++i) d[i] = (d[i] - v * o.d[i]) * inv;
        return *this;
    }

    friend Dual operator+(Dual a, const Dual& b) { return a += b; }
    friend Dual operator-(Dual a, const Dual& b) { return a -= b; }
    friend Dual operator*(Dual a, const Dual& b) { return a *= b; }
    friend Dual operator/(Dual a, const Dual& b) { return a /= b; }
    friend Dual operator-(Dual a)
    {
        a.v = -a.v;
        for (int i = 0; i < N; ++i) a.d[i] = -a.d[i];
        return a;
    }

    friend Dual operator*(double s, Dual a)
    {
        a.v *= s;
        for (int i = 0; i < N; ++i) a.d[i] *= s;
        return a;
    }
    friend Dual operator*(Dual a, double s) { return s * a; }

    friend bool operator<(const Dual& a, const Dual& b) { return a.v < b.v; }
    friend bool operator<(const Dual& a, double b) { return a.v < b; }
    friend bool operator>(const Dual& a, double b) { return a.v > b; }

    friend Dual sqrt(const Dual& a)
    {
        Dual r(std::sqrt(a.v));
        const double k = 0.5 / r.v;
        for (int i = 0; i < N; ++i) r.d[i] = k * a.d[i];
        return r;
    }
};

inline double value_of(double x) { return x; }
template <int N>
double value_of(const Dual<N>& x)
{
    return x.v;
}

}  // namespace uranex
