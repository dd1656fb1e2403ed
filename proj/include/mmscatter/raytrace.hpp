#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <tuple>
#include <vector>

#include "errors.hpp"
#include "geometry.hpp"
#include "lobes.hpp"
#include "materials.hpp"
#include "scan.hpp"
#include "units.hpp"

namespace mmscatter {

struct SimOptions
{
    double tile_edge = 0.10;  // m
    NormalizationMode mode = NormalizationMode::Hemisphere;
    Polarization polarization = Polarization::TE;
    AntennaMask tx_mask;
    AntennaMask rx_mask;
    bool gating = true;
    double power_gate_db = 35.0;
    double path_gate_m = 1.5;
    double delay_gate_s = 5e-9;
    QuadratureOptions quadrature;

    /// The stricter of the path-length and excess-delay gates, in meters.
    double excess_length_limit() const
    {
        return std::min(path_gate_m, delay_gate_s * speed_of_light);
    }
};

enum class PathKind
{
    Specular,
    Diffuse,
};

struct PathContribution
{
    PathKind kind = PathKind::Specular;
    std::optional<std::size_t> patch_id;
    double power = 0.0;        // W
    double path_length = 0.0;  // r_i + r_s, m
    double excess_delay = 0.0; // s, relative to the strongest path
};

struct GatingReport
{
    std::size_t zero_power = 0;
    std::size_t below_power_floor = 0;
    std::size_t beyond_excess_delay = 0;
};

struct SimResult
{
    double total_power_w = 0.0;
    double specular_power_w = 0.0;
    double diffuse_power_w = 0.0;
    double total_power_dbm = 0.0;
    double specular_power_dbm = 0.0;
    double diffuse_power_dbm = 0.0;
    std::vector<PathContribution> contributions;  // retained paths only
    GatingReport gating;
    ExtentKind extent_kind = ExtentKind::Area;
};

namespace detail {

// Process-wide memo of lobe normalizations. Kernels over the same scene see
// the same tile angles, and the quadrature dominates their setup cost.
inline double cached_normalization(int alpha, double theta_i, NormalizationMode mode, LobeAxis axis,
                                   QuadratureOptions const& opts)
{
    if (mode == NormalizationMode::Hemisphere)
        axis = LobeAxis::Specular;  // the integral does not depend on the axis
    using Key = std::tuple<int, double, int, int, double, std::size_t, int, int>;
    static std::mutex mutex;
    static std::map<Key, double> memo;
    Key const key{alpha, theta_i, static_cast<int>(mode), static_cast<int>(axis), opts.abs_tolerance,
                  opts.max_evaluations, opts.min_depth, opts.max_depth};
    {
        std::lock_guard lock(mutex);
        if (auto it = memo.find(key); it != memo.end())
            return it->second;
    }
    double const value = lobe_normalization(alpha, theta_i, mode, axis, opts);
    std::lock_guard lock(mutex);
    if (memo.size() >= 1'000'000)
        memo.clear();
    memo.emplace(key, value);
    return value;
}

}  // namespace detail

/// Precomputed single-bounce geometry for a fixed scene, material and
/// receiver set. Everything that does not depend on the lobe parameters is
/// evaluated once; lobe normalizations are computed per width factor on
/// first use.
class ScanKernel
{
  public:
    ScanKernel(Scene const& scene, Material const& material, std::vector<Vec3> receivers,
               RadioLink const& link, SimOptions const& options)
        : options_(options), receivers_(std::move(receivers)), cache_(std::make_unique<Cache>())
    {
        scene.validate();
        material.validate();
        if (std::abs(link.wavelength() - scene.wavelength()) > 1e-12 * scene.wavelength())
            throw InputError("radio link wavelength does not match the scene frequency");
        if (scene.wall.material != material.name)
            throw InputError("material '" + material.name + "' does not match the wall material '"
                             + scene.wall.material + "'");

        Wall const& wall = scene.wall;
        Vec3 const n = wall.normal;
        double const lam = link.wavelength();
        tiles_ = tile_wall(wall, options.tile_edge);

        tile_theta_.reserve(tiles_.size());
        for (auto const& t : tiles_)
            tile_theta_.push_back(angle_between(scene.tx - t.center, n));

        double const rx_const = lam * lam / (480.0 * pi * pi);
        specular_.reserve(receivers_.size());
        std::size_t const n_terms = receivers_.size() * tiles_.size();
        coupling_.reserve(n_terms);
        base_r_.reserve(n_terms);
        base_i_.reserve(n_terms);
        path_length_.reserve(n_terms);
        for (Vec3 const& rx : receivers_)
        {
            specular_.push_back(specular_path(scene, material, rx, link));
            for (std::size_t k = 0; k < tiles_.size(); ++k)
            {
                Tile const& tile = tiles_[k];
                ScatterGeometry const g = patch_angles(scene.tx, rx, tile.center, n);
                double const gt = link.g_t() * options.tx_mask.factor(wall.center - scene.tx, tile.center - scene.tx);
                double const gr = link.g_r() * options.rx_mask.factor(wall.center - rx, tile.center - rx);
                double const k_sq = 60.0 * link.p_t() * gt;
                double const rr = g.r_i * g.r_s;
                // W per unit S^2 * pattern / F
                coupling_.push_back(gr * rx_const * (k_sq / (rr * rr)) * (tile.area * std::cos(g.theta_i)));
                base_r_.push_back(0.5 * (1.0 + std::cos(g.psi_r)));
                base_i_.push_back(0.5 * (1.0 + std::cos(g.psi_i)));
                path_length_.push_back(g.r_i + g.r_s);
            }
        }
    }

    std::size_t receiver_count() const { return receivers_.size(); }
    std::size_t tile_count() const { return tiles_.size(); }
    std::vector<Tile> const& tiles() const { return tiles_; }
    SimOptions const& options() const { return options_; }

    /// Full result with per-path bookkeeping for one receiver.
    SimResult evaluate(std::size_t rx_index, LobeParams const& params) const
    {
        SimResult result;
        std::vector<double> scratch;
        evaluate_impl(rx_index, params, scratch, &result);
        return result;
    }

    /// Total received power in dBm for every receiver. Same arithmetic as
    /// evaluate(), without path bookkeeping.
    std::vector<double> total_dbm(LobeParams const& params) const
    {
        std::vector<double> out(receivers_.size());
        std::vector<double> scratch;
        for (std::size_t i = 0; i < receivers_.size(); ++i)
            out[i] = watts_to_dbm(evaluate_impl(i, params, scratch, nullptr));
        return out;
    }

    /// Lobe normalization of one tile for width factor alpha.
    double tile_normalization(std::size_t tile, int alpha, LobeAxis axis) const
    {
        return slot(alpha, axis).norm[tile];
    }

  private:
    struct SpecularPath
    {
        bool present = false;
        double power = 0.0;
        double path_length = 0.0;
    };

    // Per width factor and lobe axis: tile normalizations and the lobe base
    // raised to alpha for every (receiver, tile) pair, built on first use.
    struct Slot
    {
        std::once_flag once;
        std::vector<double> norm;
        std::vector<double> power;
    };

    struct Cache
    {
        std::array<Slot, 2 * max_width_factor> slots;
    };

    Slot const& slot(int alpha, LobeAxis axis) const
    {
        auto& sl = cache_->slots[slot_index(alpha, axis)];
        std::call_once(sl.once, [&] {
            sl.norm.resize(tiles_.size());
            for (std::size_t k = 0; k < tiles_.size(); ++k)
                sl.norm[k] = detail::cached_normalization(alpha, tile_theta_[k], options_.mode, axis,
                                                         options_.quadrature);
            auto const& base = axis == LobeAxis::Specular ? base_r_ : base_i_;
            sl.power.resize(base.size());
            for (std::size_t j = 0; j < base.size(); ++j)
                sl.power[j] = ipow(base[j], alpha);
        });
        return sl;
    }

    static std::size_t slot_index(int alpha, LobeAxis axis)
    {
        if (alpha < min_width_factor || alpha > max_width_factor)
            throw DomainError("width factor must lie in 1..10");
        return static_cast<std::size_t>(alpha - 1) + (axis == LobeAxis::Incident ? max_width_factor : 0);
    }

    SpecularPath specular_path(Scene const& scene, Material const& material, Vec3 rx,
                               RadioLink const& link) const
    {
        SpecularPath path;
        Wall const& wall = scene.wall;
        auto const point = specular_point(scene.tx, rx, wall);
        if (!point)
            return path;
        double const r_i = norm(*point - scene.tx);
        double const r_s = norm(rx - *point);
        double const theta = angle_between(scene.tx - *point, wall.normal);
        double const gamma = fresnel_gamma(material.eps_r, theta, options_.polarization);
        double const r = rayleigh_factor(material.h_rms, theta, link.wavelength());
        double const gamma_rough = rough_reflection(gamma, r);
        // Directions toward the mirror images stay defined when rx sits on the plane.
        double const gt = link.g_t() * options_.tx_mask.factor(wall.center - scene.tx, image_point(rx, wall) - scene.tx);
        double const gr = link.g_r() * options_.rx_mask.factor(wall.center - rx, image_point(scene.tx, wall) - rx);
        double const d = r_i + r_s;
        double const lam = link.wavelength();
        double const spread = lam / (4.0 * pi * d);
        path.present = true;
        path.path_length = d;
        path.power = link.p_t() * gt * gr * spread * spread * gamma_rough * gamma_rough;
        return path;
    }

    double evaluate_impl(std::size_t rx_index, LobeParams const& params, std::vector<double>& tile_power,
                         SimResult* record) const
    {
        params.validate();
        SpecularPath const& spec = specular_[rx_index];
        std::size_t const n = tiles_.size();
        std::size_t const off = rx_index * n;
        double const* coupling = coupling_.data() + off;
        double const* path_length = path_length_.data() + off;
        double const s_sq = params.s_coeff * params.s_coeff;
        bool const dual = params.model == LobeModel::DualLobe;
        double const lam = dual ? *params.lambda_mix : 1.0;

        tile_power.assign(tiles_.size(), 0.0);
        if (s_sq > 0.0)
        {
            Slot const& sr = slot(params.alpha_r, LobeAxis::Specular);
            double const* norm_r = sr.norm.data();
            double const* pow_r = sr.power.data() + off;
            double* tp = tile_power.data();
            if (!dual)
            {
                for (std::size_t k = 0; k < n; ++k)
                    tp[k] = coupling[k] * s_sq * (pow_r[k] / norm_r[k]);
            }
            else
            {
                Slot const& si = slot(*params.alpha_i, LobeAxis::Incident);
                double const* norm_i = si.norm.data();
                double const* pow_i = si.power.data() + off;
                double const mu = 1.0 - lam;
                for (std::size_t k = 0; k < n; ++k)
                    tp[k] = coupling[k] * s_sq
                            * ((lam * pow_r[k] + mu * pow_i[k]) / (lam * norm_r[k] + mu * norm_i[k]));
            }
        }

        // Strongest path: specular first, then tiles in index order.
        double best_power = 0.0;
        double best_length = 0.0;
        if (spec.present && spec.power > 0.0)
        {
            best_power = spec.power;
            best_length = spec.path_length;
        }
        for (std::size_t k = 0; k < tiles_.size(); ++k)
        {
            if (tile_power[k] > best_power)
            {
                best_power = tile_power[k];
                best_length = path_length[k];
            }
        }

        bool const gate = options_.gating;
        double const floor = best_power * db_to_linear(-options_.power_gate_db);
        double const limit = options_.excess_length_limit();
        GatingReport report;
        auto keep = [&](double power, double length) {
            if (!(power > 0.0))
            {
                ++report.zero_power;
                return false;
            }
            if (!gate)
                return true;
            if (power < floor)
            {
                ++report.below_power_floor;
                return false;
            }
            if (length - best_length > limit)
            {
                ++report.beyond_excess_delay;
                return false;
            }
            return true;
        };
        auto add = [&](PathKind kind, std::optional<std::size_t> id, double power, double length) {
            if (record)
                record->contributions.push_back(
                    {kind, id, power, length, (length - best_length) / speed_of_light});
        };

        double specular_sum = 0.0;
        if (spec.present && keep(spec.power, spec.path_length))
        {
            specular_sum = spec.power;
            add(PathKind::Specular, std::nullopt, spec.power, spec.path_length);
        }
        double diffuse_sum = 0.0;
        for (std::size_t k = 0; k < tiles_.size(); ++k)
        {
            if (keep(tile_power[k], path_length[k]))
            {
                diffuse_sum += tile_power[k];
                add(PathKind::Diffuse, k, tile_power[k], path_length[k]);
            }
        }
        double const total = specular_sum + diffuse_sum;
        if (record)
        {
            record->specular_power_w = specular_sum;
            record->diffuse_power_w = diffuse_sum;
            record->total_power_w = total;
            record->specular_power_dbm = watts_to_dbm(specular_sum);
            record->diffuse_power_dbm = watts_to_dbm(diffuse_sum);
            record->total_power_dbm = watts_to_dbm(total);
            record->gating = report;
            record->extent_kind = ExtentKind::Area;
        }
        return total;
    }

    SimOptions options_;
    std::vector<Vec3> receivers_;
    std::vector<Tile> tiles_;
    std::vector<double> tile_theta_;
    std::vector<SpecularPath> specular_;
    // receiver-major (receiver, tile) terms
    std::vector<double> coupling_;
    std::vector<double> base_r_;
    std::vector<double> base_i_;
    std::vector<double> path_length_;
    std::unique_ptr<Cache> cache_;
};

//---------------------------------------------------------------------------//
// Simulation entry points
//---------------------------------------------------------------------------//

inline SimResult simulate_point(Scene const& scene, MaterialDatabase const& materials, Vec3 rx,
                                LobeParams const& params, RadioLink const& link,
                                SimOptions const& options = {})
{
    ScanKernel kernel(scene, materials.find(scene.wall.material), {rx}, link, options);
    return kernel.evaluate(0, params);
}

struct SimulatedPoint
{
    double azimuth_deg = 0.0;
    double delta_h = 0.0;
    double total_dbm = 0.0;
    double specular_dbm = 0.0;
    double diffuse_dbm = 0.0;

    friend bool operator==(SimulatedPoint const&, SimulatedPoint const&) = default;
};

struct SimulatedScan
{
    std::vector<SimulatedPoint> points;

    Scan to_scan() const
    {
        Scan s;
        for (auto const& p : points)
            s.points.push_back({p.azimuth_deg, p.delta_h, p.total_dbm});
        return s;
    }
};

/// Receivers of a scan placed on the arc of the given radius.
inline std::vector<Vec3> scan_receivers(Scene const& scene, double radius, Scan const& scan)
{
    std::vector<Vec3> out;
    out.reserve(scan.size());
    for (auto const& p : scan.points)
        out.push_back(rx_position(scene.wall, radius, p.azimuth_deg, p.delta_h));
    return out;
}

inline SimulatedScan simulate_scan(Scene const& scene, MaterialDatabase const& materials,
                                   ScanSpec const& spec, LobeParams const& params,
                                   RadioLink const& link, SimOptions const& options = {})
{
    auto const positions = scan_positions(scene, spec);
    std::vector<Vec3> receivers;
    receivers.reserve(positions.size());
    for (auto const& p : positions)
        receivers.push_back(p.position);
    ScanKernel kernel(scene, materials.find(scene.wall.material), std::move(receivers), link, options);
    SimulatedScan out;
    out.points.reserve(positions.size());
    for (std::size_t i = 0; i < positions.size(); ++i)
    {
        SimResult const r = kernel.evaluate(i, params);
        out.points.push_back({positions[i].azimuth_deg, positions[i].delta_h, r.total_power_dbm,
                              r.specular_power_dbm, r.diffuse_power_dbm});
    }
    return out;
}

struct ConvergenceRow
{
    double tile_edge = 0.0;
    double total_dbm = 0.0;
    double specular_dbm = 0.0;
    double diffuse_dbm = 0.0;
};

struct ConvergenceReport
{
    std::vector<ConvergenceRow> rows;
    bool converged = false;  // last two totals within 0.1 dB
};

/// Total power as the tile edge halves from 0.4 m to 0.025 m.
inline ConvergenceReport convergence_probe(Scene const& scene, MaterialDatabase const& materials, Vec3 rx,
                                           LobeParams const& params, RadioLink const& link,
                                           SimOptions options = {})
{
    ConvergenceReport report;
    for (double edge = 0.4; edge > 0.02; edge *= 0.5)
    {
        options.tile_edge = edge;
        SimResult const r = simulate_point(scene, materials, rx, params, link, options);
        report.rows.push_back({edge, r.total_power_dbm, r.specular_power_dbm, r.diffuse_power_dbm});
    }
    auto const n = report.rows.size();
    double const a = report.rows[n - 1].total_dbm;
    double const b = report.rows[n - 2].total_dbm;
    report.converged = (a == b) || std::abs(a - b) < 0.1;
    return report;
}

}  // namespace mmscatter
