#pragma once

#include <cmath>
#include <limits>
#include <numbers>

namespace mmscatter {

inline constexpr double pi = std::numbers::pi;
inline constexpr double speed_of_light = 299792458.0;  // m/s

constexpr double deg_to_rad(double deg) { return deg * (pi / 180.0); }
constexpr double rad_to_deg(double rad) { return rad * (180.0 / pi); }

inline double wavelength_from_frequency(double hz) { return speed_of_light / hz; }

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

// 0 W maps to -inf dBm.
inline double watts_to_dbm(double watts)
{
    if (watts <= 0.0)
        return -std::numeric_limits<double>::infinity();
    return 10.0 * std::log10(watts) + 30.0;
}

inline double dbm_to_watts(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }

// Integer power by repeated multiplication; exact order of operations so
// every call site produces identical bits.
inline double ipow(double base, int exponent)
{
    double result = 1.0;
    for (int k = 0; k < exponent; ++k)
        result *= base;
    return result;
}

}  // namespace mmscatter
