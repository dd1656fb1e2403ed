#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "errors.hpp"
#include "materials.hpp"
#include "quadrature.hpp"
#include "units.hpp"

namespace mmscatter {

enum class LobeModel
{
    SingleLobe,  // directive lobe around the specular direction
    DualLobe,    // directive lobe plus a backscatter lobe around the incident direction
};

inline constexpr int min_width_factor = 1;
inline constexpr int max_width_factor = 10;

/// Diffuse-scattering model selector and its parameters.
struct LobeParams
{
    LobeModel model = LobeModel::SingleLobe;
    double s_coeff = 0.0;
    int alpha_r = 1;
    std::optional<int> alpha_i;        // DualLobe only
    std::optional<double> lambda_mix;  // DualLobe only

    static LobeParams single(double s, int alpha_r)
    {
        LobeParams p;
        p.model = LobeModel::SingleLobe;
        p.s_coeff = s;
        p.alpha_r = alpha_r;
        p.validate();
        return p;
    }

    static LobeParams dual(double s, int alpha_r, int alpha_i, double lambda_mix)
    {
        LobeParams p;
        p.model = LobeModel::DualLobe;
        p.s_coeff = s;
        p.alpha_r = alpha_r;
        p.alpha_i = alpha_i;
        p.lambda_mix = lambda_mix;
        p.validate();
        return p;
    }

    LobeParams with_s(double s) const
    {
        LobeParams p = *this;
        p.s_coeff = s;
        p.validate();
        return p;
    }

    void validate() const
    {
        auto in_range = [](int a) { return a >= min_width_factor && a <= max_width_factor; };
        if (!(s_coeff >= 0.0 && s_coeff < 1.0))
            throw DomainError("scattering coefficient must lie in [0, 1)");
        if (!in_range(alpha_r))
            throw DomainError("alpha_r must be an integer in 1..10");
        if (model == LobeModel::SingleLobe)
        {
            if (alpha_i || lambda_mix)
                throw DomainError("single-lobe parameters must not carry alpha_i or lambda");
            return;
        }
        if (!alpha_i || !lambda_mix)
            throw DomainError("dual-lobe parameters require alpha_i and lambda");
        if (!in_range(*alpha_i))
            throw DomainError("alpha_i must be an integer in 1..10");
        if (!(*lambda_mix >= 0.0 && *lambda_mix <= 1.0))
            throw DomainError("lambda must lie in [0, 1]");
    }

    friend bool operator==(LobeParams const&, LobeParams const&) = default;
};

inline char const* to_string(LobeModel m)
{
    return m == LobeModel::SingleLobe ? "single" : "dual";
}

/// How the surface-extent term of the field expression is read.
enum class ExtentKind
{
    Length,  // in-plane reading, meters
    Area,    // tiled 3D reading, square meters
};

inline char const* to_string(ExtentKind k) { return k == ExtentKind::Length ? "length" : "area"; }

/// Per-path angular and distance context of one scattering element.
struct ScatterGeometry
{
    double r_i = 0.0;
    double r_s = 0.0;
    double theta_i = 0.0;
    double theta_s = 0.0;
    double psi_r = 0.0;  // scattering vs specular direction
    double psi_i = 0.0;  // scattering vs reversed incident direction
    double surface_extent = 1.0;
    ExtentKind extent_kind = ExtentKind::Length;
};

/// Transmit power and antenna gains in linear units.
class RadioLink
{
  public:
    RadioLink(double p_t, double g_t, double g_r, double wavelength)
        : p_t_(p_t), g_t_(g_t), g_r_(g_r), wavelength_(wavelength), k_const_(std::sqrt(60.0 * p_t * g_t))
    {
        if (!(p_t >= 0.0) || !(g_t > 0.0) || !(g_r > 0.0))
            throw DomainError("radio link: power must be >= 0 and gains > 0");
        if (!(wavelength > 0.0))
            throw DomainError("radio link: wavelength must be positive");
    }

    static RadioLink from_db(double p_t_dbm, double g_t_dbi, double g_r_dbi, double wavelength)
    {
        return RadioLink(dbm_to_watts(p_t_dbm), db_to_linear(g_t_dbi), db_to_linear(g_r_dbi),
                         wavelength);
    }

    /// 10 dBm into 15 dBi horns at both ends.
    static RadioLink measurement_default(double wavelength)
    {
        return from_db(10.0, 15.0, 15.0, wavelength);
    }

    double p_t() const { return p_t_; }
    double g_t() const { return g_t_; }
    double g_r() const { return g_r_; }
    double wavelength() const { return wavelength_; }
    /// Amplitude constant sqrt(60 P_t G_t).
    double k_const() const { return k_const_; }

  private:
    double p_t_;
    double g_t_;
    double g_r_;
    double wavelength_;
    double k_const_;
};

enum class NormalizationMode
{
    PaperLine,   // 1D integral over the incidence plane, |sin(theta_s)| weight
    Hemisphere,  // solid-angle integral over the upper hemisphere
};

inline char const* to_string(NormalizationMode m)
{
    return m == NormalizationMode::PaperLine ? "paper-line" : "hemisphere";
}

enum class LobeAxis
{
    Specular,
    Incident,
};

/// ((1 + cos psi) / 2)^alpha
inline double lobe_gain(double psi, int alpha)
{
    return ipow(0.5 * (1.0 + std::cos(psi)), alpha);
}

/// Integral of one lobe for incidence angle theta_i.
///
/// Hemisphere mode integrates over solid angle by rotating to the lobe axis:
/// the ring at angle psi from the axis contributes the azimuthal extent that
/// stays above the surface, which is available in closed form. Both lobe
/// axes sit at polar angle theta_i, so the axis only matters in PaperLine
/// mode.
inline double lobe_normalization(int alpha, double theta_i, NormalizationMode mode, LobeAxis axis,
                                 QuadratureOptions const& opts = {})
{
    if (mode == NormalizationMode::PaperLine)
    {
        double const sign = axis == LobeAxis::Specular ? -1.0 : 1.0;
        auto integrand = [&](double ts) {
            return ipow(0.5 * (1.0 + std::cos(ts + sign * theta_i)), alpha) * std::abs(std::sin(ts));
        };
        return adaptive_simpson(integrand, -0.5 * pi, 0.5 * pi, opts, {0.0});
    }

    double const ct = std::cos(theta_i);
    double const st = std::sin(theta_i);
    double const full_ring = 0.5 * pi - theta_i;
    double const no_ring = std::min(pi, 0.5 * pi + theta_i);
    auto integrand = [&](double psi) {
        double const cp = std::cos(psi);
        double const sp = std::sin(psi);
        double extent;
        if (psi <= full_ring)
            extent = 2.0 * pi;
        else if (psi >= no_ring)
            extent = 0.0;
        else
            extent = 2.0 * std::acos(std::clamp(-cp * ct / (sp * st), -1.0, 1.0));
        return ipow(0.5 * (1.0 + cp), alpha) * sp * extent;
    };
    return adaptive_simpson(integrand, 0.0, no_ring, opts, {full_ring});
}

/// Normalization of the full model; the dual-lobe value is the
/// lambda-weighted sum of the two lobe integrals.
inline double normalization_f(LobeParams const& params, double theta_i, NormalizationMode mode,
                              QuadratureOptions const& opts = {})
{
    params.validate();
    double const fwd = lobe_normalization(params.alpha_r, theta_i, mode, LobeAxis::Specular, opts);
    if (params.model == LobeModel::SingleLobe)
        return fwd;
    double const lam = *params.lambda_mix;
    double const back = lobe_normalization(*params.alpha_i, theta_i, mode, LobeAxis::Incident, opts);
    return lam * fwd + (1.0 - lam) * back;
}

/// Unnormalized lobe pattern of the model in one direction.
inline double lobe_pattern(LobeParams const& params, double psi_r, double psi_i)
{
    double const fwd = lobe_gain(psi_r, params.alpha_r);
    if (params.model == LobeModel::SingleLobe)
        return fwd;
    double const lam = *params.lambda_mix;
    return lam * fwd + (1.0 - lam) * lobe_gain(psi_i, *params.alpha_i);
}

/// |E_s|^2 with a precomputed normalization integral.
inline double scattered_field_sq(LobeParams const& params, ScatterGeometry const& geom,
                                 RadioLink const& link, double normalization)
{
    if (!(geom.r_i > 0.0) || !(geom.r_s > 0.0))
        throw DegenerateGeometry("scattered field: r_i and r_s must be positive");
    if (!(normalization > 0.0))
        throw NumericalError("scattered field: normalization must be positive");
    double const amp = params.s_coeff * link.k_const() / (geom.r_i * geom.r_s);
    return amp * amp * (geom.surface_extent * std::cos(geom.theta_i) / normalization)
           * lobe_pattern(params, geom.psi_r, geom.psi_i);
}

inline double scattered_field_sq(LobeParams const& params, ScatterGeometry const& geom,
                                 RadioLink const& link, NormalizationMode mode)
{
    params.validate();
    if (!(geom.r_i > 0.0) || !(geom.r_s > 0.0))
        throw DegenerateGeometry("scattered field: r_i and r_s must be positive");
    return scattered_field_sq(params, geom, link, normalization_f(params, geom.theta_i, mode));
}

/// P_r = G_r lambda^2 / (480 pi^2) |E_s|^2, in watts.
inline double received_scatter_power(double e_s_sq, double g_r, double wavelength)
{
    if (!(e_s_sq >= 0.0))
        throw DomainError("received power: |E_s|^2 must be nonnegative");
    return g_r * wavelength * wavelength / (480.0 * pi * pi) * e_s_sq;
}

//---------------------------------------------------------------------------//
// Angular sweeps at a single patch
//---------------------------------------------------------------------------//

enum class PatternDirection
{
    Incident,
    Specular,
};

inline char const* to_string(PatternDirection d)
{
    return d == PatternDirection::Incident ? "incident" : "specular";
}

struct PatternOptions
{
    NormalizationMode mode = NormalizationMode::Hemisphere;
    Polarization polarization = Polarization::TE;
    std::optional<double> s_override;
    double r_i = 1.0;
    double r_s = 1.0;
    double surface_extent = 1.0;
};

struct PatternRow
{
    double theta_i_deg = 0.0;
    PatternDirection direction = PatternDirection::Specular;
    double s_coeff = 0.0;
    double p_r_w = 0.0;
    double p_r_dbm = 0.0;
};

/// Scattered power received in the incident and/or specular direction of a
/// unit patch as the incidence angle varies. S follows the material's
/// theoretical value at each angle unless overridden; the lobe shape comes
/// from `shape`.
inline std::vector<PatternRow> pattern_sweep(Material const& material, LobeParams const& shape,
                                             RadioLink const& link,
                                             std::span<PatternDirection const> directions,
                                             std::span<double const> theta_grid_deg,
                                             PatternOptions const& opts = {})
{
    std::vector<PatternRow> rows;
    rows.reserve(directions.size() * theta_grid_deg.size());
    for (double theta_deg : theta_grid_deg)
    {
        if (!(theta_deg > 0.0 && theta_deg < 90.0))
            throw DomainError("pattern sweep: incidence angles must lie in (0, 90) degrees");
        double const theta = deg_to_rad(theta_deg);
        double s = opts.s_override.value_or(0.0);
        if (!opts.s_override)
        {
            IncidenceContext ctx{theta, link.wavelength(), opts.polarization};
            s = initial_scattering_coefficient(material, ctx).s_coeff;
        }
        LobeParams const params = shape.with_s(s);
        double const norm = normalization_f(params, theta, opts.mode);
        for (PatternDirection dir : directions)
        {
            ScatterGeometry g;
            g.r_i = opts.r_i;
            g.r_s = opts.r_s;
            g.theta_i = theta;
            g.theta_s = theta;
            g.surface_extent = opts.surface_extent;
            g.extent_kind = ExtentKind::Length;
            g.psi_r = dir == PatternDirection::Specular ? 0.0 : 2.0 * theta;
            g.psi_i = dir == PatternDirection::Specular ? 2.0 * theta : 0.0;
            double const e2 = scattered_field_sq(params, g, link, norm);
            PatternRow row;
            row.theta_i_deg = theta_deg;
            row.direction = dir;
            row.s_coeff = s;
            row.p_r_w = received_scatter_power(e2, link.g_r(), link.wavelength());
            row.p_r_dbm = watts_to_dbm(row.p_r_w);
            rows.push_back(row);
        }
    }
    return rows;
}

}  // namespace mmscatter
