#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "errors.hpp"
#include "special.hpp"
#include "units.hpp"

namespace mmscatter {

enum class Polarization
{
    TE,  // E-field perpendicular to the plane of incidence
    TM,  // E-field in the plane of incidence
};

/// Electromagnetic and roughness description of one surface. Lengths in meters.
struct Material
{
    std::string name;
    double eps_r = 1.0;
    double h_rms = 0.0;
    double thickness = 0.0;

    void validate() const
    {
        if (name.empty())
            throw InputError("material name must not be empty");
        if (!(eps_r >= 1.0))
            throw InputError("material '" + name + "': eps_r must be >= 1");
        if (!(h_rms >= 0.0))
            throw InputError("material '" + name + "': h_rms must be >= 0");
        if (!(thickness > 0.0))
            throw InputError("material '" + name + "': thickness must be > 0");
    }

    friend bool operator==(Material const&, Material const&) = default;
};

struct IncidenceContext
{
    double theta_i = 0.0;     // from the surface normal, [0, pi/2)
    double wavelength = 0.0;  // m
    Polarization polarization = Polarization::TE;

    void validate() const
    {
        if (!(theta_i >= 0.0 && theta_i < 0.5 * pi))
            throw DomainError("incidence angle must lie in [0, pi/2)");
        if (!(wavelength > 0.0))
            throw DomainError("wavelength must be positive");
    }
};

/// Smooth and rough reflection coefficients with the scattering coefficient
/// they imply.
struct ReflectionBundle
{
    double gamma = 0.0;           // smooth-surface amplitude coefficient
    double rayleigh_r = 1.0;      // roughness loss factor
    double gamma_rough = 0.0;     // rayleigh_r * gamma
    double s_coeff = 0.0;         // sqrt((1 - R^2) gamma^2)
    double transmission_t = 1.0;  // sqrt(1 - gamma^2)
};

/// Fresnel amplitude reflection coefficient of a lossless dielectric half-space.
inline double fresnel_gamma(double eps_r, double theta_i, Polarization pol)
{
    if (!(eps_r >= 1.0))
        throw DomainError("fresnel_gamma: eps_r must be >= 1");
    if (!(theta_i >= 0.0 && theta_i <= 0.5 * pi))
        throw DomainError("fresnel_gamma: incidence angle must lie in [0, pi/2]");
    double const c = std::cos(theta_i);
    // eps - sin^2 written as (eps - 1) + cos^2: exact when there is no contrast
    double const root = std::sqrt((eps_r - 1.0) + c * c);
    if (pol == Polarization::TE)
        return (c - root) / (c + root);
    return (eps_r * c - root) / (eps_r * c + root);
}

/// Rayleigh roughness factor R = exp(-g) I0(g), g = 8 (pi h cos(theta) / lambda)^2.
inline double rayleigh_factor(double h_rms, double theta_i, double wavelength)
{
    if (!(wavelength > 0.0))
        throw DomainError("rayleigh_factor: wavelength must be positive");
    if (!(h_rms >= 0.0))
        throw DomainError("rayleigh_factor: h_rms must be nonnegative");
    double const k = pi * h_rms * std::cos(theta_i) / wavelength;
    double const g = 8.0 * k * k;
    return scaled_bessel_i0(g);
}

inline double rough_reflection(double gamma, double rayleigh_r)
{
    if (!(std::abs(gamma) <= 1.0))
        throw DomainError("rough_reflection: |gamma| must not exceed 1");
    if (!(rayleigh_r > 0.0 && rayleigh_r <= 1.0))
        throw DomainError("rough_reflection: R must lie in (0, 1]");
    return rayleigh_r * gamma;
}

/// Bundle for an explicitly supplied smooth-surface coefficient. Use this
/// to reproduce conventions other than the Fresnel one (e.g. gamma = 1).
inline ReflectionBundle reflection_bundle(double gamma, double rayleigh_r)
{
    ReflectionBundle b;
    b.gamma = gamma;
    b.rayleigh_r = rayleigh_r;
    b.gamma_rough = rough_reflection(gamma, rayleigh_r);
    b.s_coeff = std::sqrt((1.0 - rayleigh_r * rayleigh_r) * (gamma * gamma));
    b.transmission_t = std::sqrt(std::max(0.0, 1.0 - gamma * gamma));
    return b;
}

/// Theoretical scattering coefficient of a material at one incidence.
inline ReflectionBundle initial_scattering_coefficient(Material const& material,
                                                       IncidenceContext const& ctx)
{
    material.validate();
    ctx.validate();
    double const gamma = fresnel_gamma(material.eps_r, ctx.theta_i, ctx.polarization);
    double const r = rayleigh_factor(material.h_rms, ctx.theta_i, ctx.wavelength);
    return reflection_bundle(gamma, r);
}

//---------------------------------------------------------------------------//
// Material database
//---------------------------------------------------------------------------//

class MaterialDatabase
{
  public:
    MaterialDatabase() = default;

    void add(Material m)
    {
        m.validate();
        if (contains(m.name))
            throw InputError("duplicate material name '" + m.name + "'");
        materials_.push_back(std::move(m));
    }

    bool contains(std::string_view name) const { return lookup(name).has_value(); }

    Material const& find(std::string_view name) const
    {
        auto idx = lookup(name);
        if (!idx)
            throw InputError("unknown material '" + std::string(name) + "'");
        return materials_[*idx];
    }

    std::vector<Material> const& all() const { return materials_; }
    std::size_t size() const { return materials_.size(); }

  private:
    std::optional<std::size_t> lookup(std::string_view name) const
    {
        for (std::size_t i = 0; i < materials_.size(); ++i)
            if (materials_[i].name == name)
                return i;
        return std::nullopt;
    }

    std::vector<Material> materials_;
};

/// Text of the shipped material file (same content as data/materials.txt).
inline constexpr std::string_view default_materials_text
    = "# Building surfaces measured at 28 GHz.\n"
      "# eps_r is the real relative permittivity; lengths carry explicit units.\n"
      "name=metal_sheet; eps_r=6.0; h_rms_mm=0.170; thickness_cm=0.3\n"
      "name=marble_wall; eps_r=6.2; h_rms_mm=0.216; thickness_cm=15\n"
      "name=smooth_wall; eps_r=5.8; h_rms_mm=0.445; thickness_cm=25\n"
      "name=rough_wall; eps_r=10.5; h_rms_mm=0.715; thickness_cm=32\n";

}  // namespace mmscatter
