#pragma once

#include <cmath>

#include "errors.hpp"
#include "units.hpp"

namespace mmscatter {

namespace detail {

inline constexpr double bessel_i0_switch = 15.0;

// sum_k (x^2/4)^k / (k!)^2; all terms positive, so no cancellation.
inline double bessel_i0_series(double x)
{
    double const q = 0.25 * x * x;
    double term = 1.0;
    double sum = 1.0;
    for (int k = 1; k < 200; ++k)
    {
        term *= q / (static_cast<double>(k) * static_cast<double>(k));
        sum += term;
        if (term < 1e-17 * sum)
            break;
    }
    return sum;
}

// e^-x I0(x) ~ 1/sqrt(2 pi x) * sum_k ((2k-1)!!)^2 / (k! (8x)^k), truncated
// at the smallest term.
inline double scaled_bessel_i0_asymptotic(double x)
{
    double term = 1.0;
    double sum = 1.0;
    for (int k = 1; k < 60; ++k)
    {
        double const odd = 2.0 * k - 1.0;
        double const next = term * odd * odd / (8.0 * k * x);
        if (next > term)
            break;
        term = next;
        sum += term;
        if (term < 1e-17 * sum)
            break;
    }
    return sum / std::sqrt(2.0 * pi * x);
}

}  // namespace detail

/// Modified Bessel function of the first kind, order zero, for 0 <= x <= 700.
inline double bessel_i0(double x)
{
    if (!(x >= 0.0) || x > 700.0)
        throw DomainError("bessel_i0: argument must lie in [0, 700]");
    if (x < detail::bessel_i0_switch)
        return detail::bessel_i0_series(x);
    return std::exp(x) * detail::scaled_bessel_i0_asymptotic(x);
}

/// exp(-x) * I0(x), evaluated without overflow for any x >= 0.
inline double scaled_bessel_i0(double x)
{
    if (!(x >= 0.0))
        throw DomainError("scaled_bessel_i0: argument must be nonnegative");
    if (x < detail::bessel_i0_switch)
        return std::exp(-x) * detail::bessel_i0_series(x);
    return detail::scaled_bessel_i0_asymptotic(x);
}

}  // namespace mmscatter
