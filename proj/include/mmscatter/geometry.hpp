#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "errors.hpp"
#include "lobes.hpp"
#include "units.hpp"
#include "vec3.hpp"

namespace mmscatter {

inline constexpr Vec3 world_up{0.0, 0.0, 1.0};

/// Rectangular wall. The horizontal tangent points toward the specular side
/// of a transmitter placed at negative azimuth.
struct Wall
{
    Vec3 center;
    Vec3 normal{0.0, 1.0, 0.0};  // outward, unit length
    double width = 3.0;
    double height = 3.0;
    std::string material;

    Vec3 tangent_u() const { return normalized(cross(normal, world_up)); }
    Vec3 tangent_v() const { return cross(tangent_u(), normal); }

    double signed_distance(Vec3 p) const { return dot(p - center, normal); }

    bool contains(Vec3 p_on_plane, double tol = 1e-12) const
    {
        Vec3 const d = p_on_plane - center;
        return std::abs(dot(d, tangent_u())) <= 0.5 * width + tol
               && std::abs(dot(d, tangent_v())) <= 0.5 * height + tol;
    }
};

struct Scene
{
    Wall wall;
    Vec3 tx;
    double carrier_frequency = 28e9;  // Hz

    double wavelength() const { return wavelength_from_frequency(carrier_frequency); }

    void validate() const
    {
        if (std::abs(norm(wall.normal) - 1.0) > 1e-12)
            throw InputError("scene: wall normal must be unit length");
        if (norm(cross(wall.normal, world_up)) < 1e-9)
            throw InputError("scene: wall must not be horizontal");
        if (!(wall.width > 0.0) || !(wall.height > 0.0))
            throw InputError("scene: wall dimensions must be positive");
        if (!(wall.signed_distance(tx) > 0.0))
            throw InputError("scene: transmitter must lie on the outward side of the wall");
        if (!(carrier_frequency > 0.0))
            throw InputError("scene: carrier frequency must be positive");
    }

    /// Measurement layout: wall center at antenna height, Tx at `radius` from
    /// the center on the negative-azimuth side at incidence `theta_i_deg`.
    static Scene measurement(std::string material, double theta_i_deg, double frequency_hz = 28e9,
                             double radius = 1.5, double antenna_height = 1.7,
                             double wall_width = 3.0, double wall_height = 3.0)
    {
        Scene s;
        s.wall.center = {0.0, 0.0, antenna_height};
        s.wall.normal = {0.0, 1.0, 0.0};
        s.wall.width = wall_width;
        s.wall.height = wall_height;
        s.wall.material = std::move(material);
        double const th = deg_to_rad(theta_i_deg);
        s.tx = s.wall.center + radius * (-std::sin(th) * s.wall.tangent_u() + std::cos(th) * s.wall.normal);
        s.carrier_frequency = frequency_hz;
        s.validate();
        return s;
    }
};

/// Receiver arc/semicylinder description. Azimuth 0 is the wall normal;
/// positive azimuth is the specular side.
struct ScanSpec
{
    double radius = 1.5;
    double azimuth_step_deg = 10.0;
    double azimuth_start_deg = -90.0;
    double azimuth_end_deg = 90.0;
    std::vector<double> height_offsets{0.0};  // m

    static ScanSpec arc() { return {}; }

    static ScanSpec cylinder()
    {
        ScanSpec s;
        s.height_offsets = {0.0, 0.10, 0.20, 0.30};
        return s;
    }

    std::size_t azimuth_count() const
    {
        return static_cast<std::size_t>(
                   std::llround((azimuth_end_deg - azimuth_start_deg) / azimuth_step_deg))
               + 1;
    }

    void validate() const
    {
        if (!(radius > 0.0))
            throw InputError("scan: radius must be positive");
        if (!(azimuth_step_deg > 0.0) || !(azimuth_end_deg >= azimuth_start_deg))
            throw InputError("scan: azimuth step must be positive and range nonempty");
        if (azimuth_start_deg < -90.0 || azimuth_end_deg > 90.0)
            throw InputError("scan: azimuths must lie in [-90, 90] degrees");
        double const steps = (azimuth_end_deg - azimuth_start_deg) / azimuth_step_deg;
        if (std::abs(steps - std::round(steps)) > 1e-9)
            throw InputError("scan: azimuth step must divide the range evenly");
        if (height_offsets.empty())
            throw InputError("scan: at least one height offset is required");
    }
};

struct RxPosition
{
    double azimuth_deg = 0.0;
    double delta_h = 0.0;  // m
    Vec3 position;
};

inline Vec3 rx_position(Wall const& wall, double radius, double azimuth_deg, double delta_h)
{
    double const az = deg_to_rad(azimuth_deg);
    return wall.center + radius * (std::sin(az) * wall.tangent_u() + std::cos(az) * wall.normal)
           + delta_h * world_up;
}

/// Receiver positions ordered by (delta_h, azimuth).
inline std::vector<RxPosition> scan_positions(Scene const& scene, ScanSpec const& spec)
{
    spec.validate();
    std::vector<RxPosition> out;
    std::size_t const n_az = spec.azimuth_count();
    out.reserve(n_az * spec.height_offsets.size());
    for (double dh : spec.height_offsets)
    {
        for (std::size_t k = 0; k < n_az; ++k)
        {
            double const az = spec.azimuth_start_deg + static_cast<double>(k) * spec.azimuth_step_deg;
            out.push_back({az, dh, rx_position(scene.wall, spec.radius, az, dh)});
        }
    }
    return out;
}

/// Image-method reflection point on the wall, if it falls inside the
/// rectangle. A receiver lying on the wall plane is the grazing limit of the
/// reflected path and still yields a point.
inline std::optional<Vec3> specular_point(Vec3 tx, Vec3 rx, Wall const& wall)
{
    double const d_tx = wall.signed_distance(tx);
    double const d_rx = wall.signed_distance(rx);
    if (!(d_tx > 0.0) || d_rx < 0.0)
        return std::nullopt;
    double const t = d_tx / (d_tx + d_rx);
    Vec3 p = tx + (rx - tx) * t;
    p = p - wall.signed_distance(p) * wall.normal;
    if (!wall.contains(p))
        return std::nullopt;
    return p;
}

/// Mirror of a point across the wall plane.
inline Vec3 image_point(Vec3 p, Wall const& wall)
{
    return p - 2.0 * wall.signed_distance(p) * wall.normal;
}

/// Angles and distances of the path tx -> patch -> rx.
inline ScatterGeometry patch_angles(Vec3 tx, Vec3 rx, Vec3 patch_center, Vec3 wall_normal)
{
    Vec3 const in = patch_center - tx;
    Vec3 const out = rx - patch_center;
    ScatterGeometry g;
    g.r_i = norm(in);
    g.r_s = norm(out);
    if (!(g.r_i > 1e-12) || !(g.r_s > 1e-12))
        throw DegenerateGeometry("patch angles: transmitter or receiver coincides with the patch");
    g.theta_i = angle_between(-in, wall_normal);
    g.theta_s = angle_between(out, wall_normal);
    g.psi_r = angle_between(out, reflect(in, wall_normal));
    g.psi_i = angle_between(out, -in);
    return g;
}

//---------------------------------------------------------------------------//
// Wall tiling and antenna masks
//---------------------------------------------------------------------------//

struct Tile
{
    std::size_t index = 0;
    Vec3 center;
    double area = 0.0;
};

/// Square tiles of the given edge anchored at the wall's lower-left corner;
/// the last row/column is trimmed when the edge does not divide the wall.
/// Tiles are indexed row-major from the bottom.
inline std::vector<Tile> tile_wall(Wall const& wall, double edge)
{
    if (!(edge > 0.0))
        throw InputError("tiling: tile edge must be positive");
    auto spans = [edge](double length) {
        std::vector<std::pair<double, double>> out;  // (offset of center, size)
        auto const n = static_cast<std::size_t>(std::ceil(length / edge - 1e-9));
        for (std::size_t k = 0; k < n; ++k)
        {
            double const lo = static_cast<double>(k) * edge;
            double const hi = std::min(length, lo + edge);
            out.emplace_back(0.5 * (lo + hi) - 0.5 * length, hi - lo);
        }
        return out;
    };
    auto const us = spans(wall.width);
    auto const vs = spans(wall.height);
    Vec3 const u = wall.tangent_u();
    Vec3 const v = wall.tangent_v();
    std::vector<Tile> tiles;
    tiles.reserve(us.size() * vs.size());
    for (auto const& [vc, vsz] : vs)
        for (auto const& [uc, usz] : us)
            tiles.push_back({tiles.size(), wall.center + uc * u + vc * v, usz * vsz});
    return tiles;
}

/// Main-beam mask: full gain within half the beamwidth of boresight, a fixed
/// floor outside.
struct AntennaMask
{
    double hpbw_deg = 23.0;
    double outside_db = -20.0;
    bool enabled = true;

    double factor(Vec3 boresight, Vec3 direction) const
    {
        if (!enabled)
            return 1.0;
        double const off = rad_to_deg(angle_between(boresight, direction));
        return off <= 0.5 * hpbw_deg ? 1.0 : db_to_linear(outside_db);
    }
};

}  // namespace mmscatter
