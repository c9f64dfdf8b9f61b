#pragma once

#include <cmath>
#include <limits>

#include "error.hpp"

namespace lus {

namespace detail {

inline constexpr int kGammaMaxIter = 100000;
inline constexpr double kGammaEps = 1e-16;

// P(a,x) by its power series; converges quickly for x < a + 1.
inline double gamma_p_series(double a, double x) {
    double term = 1.0 / a, sum = term;
    for (int n = 1; n < kGammaMaxIter; ++n) {
        term *= x / (a + n);
        sum += term;
        if (std::abs(term) < std::abs(sum) * kGammaEps) break;
    }
    return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Q(a,x) by modified Lentz evaluation of the continued fraction; x >= a + 1.
inline double gamma_q_continued_fraction(double a, double x) {
    constexpr double tiny = std::numeric_limits<double>::min() / kGammaEps;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i < kGammaMaxIter; ++i) {
        const double an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double delta = d * c;
        h *= delta;
        if (std::abs(delta - 1.0) < kGammaEps) break;
    }
    return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

} // namespace detail

/// Regularized upper incomplete gamma Q(a, x) = Gamma(a, x) / Gamma(a).
inline double gamma_q(double a, double x) {
    if (!(a > 0.0) || !(x >= 0.0)) throw InputError("gamma_q requires a > 0 and x >= 0");
    if (x == 0.0) return 1.0;
    if (std::isinf(x)) return 0.0;
    if (x < a + 1.0) return 1.0 - detail::gamma_p_series(a, x);
    return detail::gamma_q_continued_fraction(a, x);
}

/// Upper tail of the chi-square distribution. Zero degrees of freedom gives 1.
inline double chi_square_sf(double statistic, double dof) {
    if (dof <= 0.0) return 1.0;
    if (statistic <= 0.0) return 1.0;
    return gamma_q(0.5 * dof, 0.5 * statistic);
}

} // namespace lus
