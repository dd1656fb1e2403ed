#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "errors.hpp"

namespace mmscatter {

struct ScanPoint
{
    double azimuth_deg = 0.0;
    double delta_h = 0.0;  // m
    double power_dbm = 0.0;

    friend bool operator==(ScanPoint const&, ScanPoint const&) = default;
};

inline bool same_position(ScanPoint const& a, ScanPoint const& b)
{
    return std::abs(a.azimuth_deg - b.azimuth_deg) < 1e-9 && std::abs(a.delta_h - b.delta_h) < 1e-12;
}

/// Ordered receiver samples of one measurement (or simulation) campaign.
struct Scan
{
    std::vector<ScanPoint> points;

    std::size_t size() const { return points.size(); }
    bool empty() const { return points.empty(); }

    std::vector<double> powers() const
    {
        std::vector<double> out;
        out.reserve(points.size());
        for (auto const& p : points)
            out.push_back(p.power_dbm);
        return out;
    }

    /// Records at delta_h = 0 only.
    Scan in_plane() const
    {
        Scan s;
        for (auto const& p : points)
            if (std::abs(p.delta_h) < 1e-12)
                s.points.push_back(p);
        return s;
    }

    void validate() const
    {
        if (points.size() < 2)
            throw InputError("scan must contain at least two positions");
        for (std::size_t i = 0; i < points.size(); ++i)
            for (std::size_t j = 0; j < i; ++j)
                if (same_position(points[i], points[j]))
                    throw InputError("scan contains a duplicated position");
    }

    friend bool operator==(Scan const&, Scan const&) = default;
};

}  // namespace mmscatter
