#include <gtest/gtest.h>

#include <array>
#include <cmath>
#include <vector>

#include "mmscatter/io.hpp"
#include "mmscatter/lobes.hpp"
#include "oracle/anchors.inc"
#include "support.hpp"

using namespace mmscatter;
using mmscatter::testing::rel_err;

namespace {

struct NormCase
{
    int alpha;
    int theta_deg;
    double hemisphere, line_specular, line_incident;
};

constexpr NormCase norm_table[] = {
#include "oracle/normalization_table.inc"
};

double const lambda_28 = wavelength_from_frequency(28e9);
RadioLink const link28 = RadioLink::measurement_default(lambda_28);

ScatterGeometry specular_geometry(double theta, double r)
{
    ScatterGeometry g;
    g.r_i = r;
    g.r_s = r;
    g.theta_i = theta;
    g.theta_s = theta;
    g.psi_r = 0.0;
    g.psi_i = 2.0 * theta;
    return g;
}

// Composite Simpson in (theta_s, phi) over the upper hemisphere.
double hemisphere_integral(LobeParams const& p, double theta_i, int n_theta, int n_phi)
{
    std::array<double, 3> const spec{std::sin(theta_i), 0.0, std::cos(theta_i)};
    std::array<double, 3> const inc{-std::sin(theta_i), 0.0, std::cos(theta_i)};
    double const ht = 0.5 * pi / n_theta;
    double const hp = 2.0 * pi / n_phi;
    auto w = [](int k, int n) { return (k == 0 || k == n) ? 1.0 : (k % 2 ? 4.0 : 2.0); };
    double sum = 0.0;
    for (int i = 0; i <= n_theta; ++i)
    {
        double const ts = i * ht;
        for (int j = 0; j <= n_phi; ++j)
        {
            double const ph = j * hp;
            std::array<double, 3> const d{std::sin(ts) * std::cos(ph), std::sin(ts) * std::sin(ph), std::cos(ts)};
            double const cr = d[0] * spec[0] + d[2] * spec[2];
            double const ci = d[0] * inc[0] + d[2] * inc[2];
            double const pat = lobe_pattern(p, std::acos(std::clamp(cr, -1.0, 1.0)), std::acos(std::clamp(ci, -1.0, 1.0)));
            sum += w(i, n_theta) * w(j, n_phi) * pat * std::sin(ts);
        }
    }
    return sum * ht * hp / 9.0;
}

}  // namespace

TEST(LobeGain, Examples)
{
    for (int a = 1; a <= 10; ++a)
        EXPECT_EQ(lobe_gain(0.0, a), 1.0);
    EXPECT_NEAR(lobe_gain(0.5 * pi, 2), 0.25, 1e-16);
    EXPECT_EQ(lobe_gain(pi, 5), 0.0);
}

TEST(LobeGain, MonotoneInAngleAndWidth)
{
    for (int a = 1; a <= 10; ++a)
    {
        double prev = 2.0;
        for (int k = 0; k <= 1000; ++k)
        {
            double const g = lobe_gain(pi * k / 1000.0, a);
            ASSERT_LT(g, prev);
            ASSERT_GE(g, 0.0);
            prev = g;
        }
    }
    for (double psi : {0.1, 1.0, 2.0, 3.0})
        for (int a = 1; a < 10; ++a)
            EXPECT_GT(lobe_gain(psi, a), lobe_gain(psi, a + 1));
}

TEST(Normalization, HemisphereClosedForm)
{
    double const f = normalization_f(LobeParams::single(0.3, 1), 0.0, NormalizationMode::Hemisphere);
    EXPECT_NEAR(f, 1.5 * pi, 1e-8);
}

TEST(Normalization, MatchesIndependentTable)
{
    for (auto const& c : norm_table)
    {
        double const th = deg_to_rad(c.theta_deg);
        EXPECT_NEAR(lobe_normalization(c.alpha, th, NormalizationMode::Hemisphere, LobeAxis::Specular), c.hemisphere,
                    1e-8)
            << c.alpha << " " << c.theta_deg;
        EXPECT_NEAR(lobe_normalization(c.alpha, th, NormalizationMode::Hemisphere, LobeAxis::Incident), c.hemisphere,
                    1e-8);
        EXPECT_NEAR(lobe_normalization(c.alpha, th, NormalizationMode::PaperLine, LobeAxis::Specular),
                    c.line_specular, 1e-8);
        EXPECT_NEAR(lobe_normalization(c.alpha, th, NormalizationMode::PaperLine, LobeAxis::Incident),
                    c.line_incident, 1e-8);
    }
}

TEST(Normalization, PaperLineTrapezoidAnchor)
{
    double const f = normalization_f(LobeParams::single(0.3, 2), deg_to_rad(30.0), NormalizationMode::PaperLine);
    EXPECT_NEAR(f, trapezoid_line_a2_t30, 1e-8);
}

TEST(Normalization, DualWithFullForwardShareEqualsSingle)
{
    for (auto mode : {NormalizationMode::PaperLine, NormalizationMode::Hemisphere})
        for (int a : {1, 4, 9})
        {
            double const th = deg_to_rad(35.0);
            EXPECT_EQ(normalization_f(LobeParams::dual(0.3, a, 7, 1.0), th, mode),
                      normalization_f(LobeParams::single(0.3, a), th, mode));
        }
}

TEST(Normalization, HemisphereDensityIntegratesToOne)
{
    for (double deg : {0.0, 25.0, 60.0, 85.0})
        for (LobeParams const& p : {LobeParams::single(0.3, 1), LobeParams::single(0.3, 7),
                                    LobeParams::dual(0.3, 2, 9, 0.3)})
        {
            double const th = deg_to_rad(deg);
            double const f = normalization_f(p, th, NormalizationMode::Hemisphere);
            EXPECT_NEAR(hemisphere_integral(p, th, 400, 800) / f, 1.0, 1e-6) << deg;
        }
}

TEST(ScatteredField, ZeroScatteringGivesZero)
{
    EXPECT_EQ(scattered_field_sq(LobeParams::single(0.0, 3), specular_geometry(0.4, 1.0), link28,
                                 NormalizationMode::Hemisphere),
              0.0);
}

TEST(ScatteredField, InverseSquarePair)
{
    auto const p = LobeParams::dual(0.4, 3, 6, 0.5);
    double const a = scattered_field_sq(p, specular_geometry(0.5, 1.5), link28, NormalizationMode::Hemisphere);
    double const b = scattered_field_sq(p, specular_geometry(0.5, 3.0), link28, NormalizationMode::Hemisphere);
    EXPECT_LT(rel_err(a / b, 16.0), 1e-14);
}

TEST(ScatteredField, MatchesTranscribedFormula)
{
    auto const p = LobeParams::single(0.3, 4);
    auto const g = specular_geometry(deg_to_rad(30.0), 1.5);
    EXPECT_LT(rel_err(scattered_field_sq(p, g, link28, f_hemi_a4_t30), field_sq_anchor), 1e-10);
    EXPECT_LT(rel_err(scattered_field_sq(p, g, link28, NormalizationMode::Hemisphere), field_sq_anchor), 1e-8);
}

TEST(ScatteredField, LinearInMixAtFixedNormalization)
{
    auto g = specular_geometry(deg_to_rad(40.0), 1.2);
    g.psi_r = 0.7;
    g.psi_i = 1.1;
    double const norm = 3.1;
    for (int k = 0; k <= 10; ++k)
    {
        double const lam = k / 10.0;
        double const mixed = scattered_field_sq(LobeParams::dual(0.3, 3, 8, lam), g, link28, norm);
        double const fwd = scattered_field_sq(LobeParams::dual(0.3, 3, 8, 1.0), g, link28, norm);
        double const back = scattered_field_sq(LobeParams::dual(0.3, 3, 8, 0.0), g, link28, norm);
        EXPECT_NEAR(mixed, lam * fwd + (1.0 - lam) * back, 1e-12 * std::max(fwd, back));
    }
}

TEST(ScatteredField, SpecularDirectionIsMaximum)
{
    auto const p = LobeParams::single(0.5, 5);
    auto g = specular_geometry(0.6, 1.0);
    double const peak = scattered_field_sq(p, g, link28, NormalizationMode::Hemisphere);
    for (int k = 1; k <= 30; ++k)
    {
        g.psi_r = pi * k / 30.0;
        EXPECT_GE(peak, scattered_field_sq(p, g, link28, NormalizationMode::Hemisphere));
    }
}

TEST(ScatteredField, DegenerateDistances)
{
    auto g = specular_geometry(0.3, 1.0);
    g.r_i = 0.0;
    EXPECT_THROW(scattered_field_sq(LobeParams::single(0.3, 2), g, link28, NormalizationMode::Hemisphere),
                 DegenerateGeometry);
}

TEST(ScatteredField, FiniteOverFullGrid)
{
    for (auto mode : {NormalizationMode::Hemisphere, NormalizationMode::PaperLine})
        for (int deg = 1; deg <= 89; deg += 4)
        {
            double const th = deg_to_rad(deg);
            std::array<double, 11> fwd{}, back{};
            for (int a = 1; a <= 10; ++a)
            {
                fwd[a] = lobe_normalization(a, th, mode, LobeAxis::Specular);
                back[a] = lobe_normalization(a, th, mode, LobeAxis::Incident);
                ASSERT_GT(fwd[a], 0.0);
            }
            auto g = specular_geometry(th, 1.5);
            g.psi_r = 0.3;
            g.psi_i = 2.0;
            for (int ar = 1; ar <= 10; ++ar)
                for (int ai = 1; ai <= 10; ++ai)
                    for (int k = 0; k <= 10; ++k)
                    {
                        double const lam = k / 10.0;
                        double const f = lam * fwd[ar] + (1.0 - lam) * back[ai];
                        double const v = scattered_field_sq(LobeParams::dual(0.5, ar, ai, lam), g, link28, f);
                        ASSERT_TRUE(std::isfinite(v));
                        ASSERT_GE(v, 0.0);
                    }
        }
}

TEST(ReceivedPower, Examples)
{
    double const g_r = db_to_linear(15.0);
    EXPECT_EQ(received_scatter_power(0.0, g_r, lambda_28), 0.0);
    EXPECT_LT(rel_err(received_scatter_power(1.0, g_r, lambda_28), p_r_unit_field), 1e-14);
    EXPECT_NEAR(received_scatter_power(1.0, g_r, lambda_28), 7.66e-7, 0.01e-7);
    EXPECT_LT(rel_err(received_scatter_power(10.0, g_r, lambda_28), 10.0 * received_scatter_power(1.0, g_r, lambda_28)),
              1e-15);
}

TEST(RadioLink, AmplitudeConstant)
{
    EXPECT_LT(rel_err(link28.k_const(), std::sqrt(60.0 * link28.p_t() * link28.g_t())), 1e-12);
    EXPECT_NEAR(link28.p_t(), 0.01, 1e-17);
    EXPECT_THROW(RadioLink(1.0, 0.0, 1.0, 0.01), DomainError);
}

TEST(LobeParams, Validation)
{
    EXPECT_THROW(LobeParams::single(1.0, 3), DomainError);
    EXPECT_THROW(LobeParams::single(0.3, 0), DomainError);
    EXPECT_THROW(LobeParams::single(0.3, 11), DomainError);
    EXPECT_THROW(LobeParams::dual(0.3, 3, 3, 1.5), DomainError);
    LobeParams bad = LobeParams::single(0.3, 3);
    bad.alpha_i = 2;
    EXPECT_THROW(bad.validate(), DomainError);
}

TEST(PatternSweep, IncidenceTrends)
{
    auto const db = io::default_material_database();
    std::vector<PatternDirection> const both{PatternDirection::Incident, PatternDirection::Specular};
    std::vector<double> const grid{10.0, 30.0, 40.0, 55.0, 70.0};
    auto const shape = LobeParams::single(0.5, 4);
    auto sweep = [&](char const* name) { return pattern_sweep(db.find(name), shape, link28, both, grid); };
    auto const rough = sweep("rough_wall");
    auto power = [](auto const& rows, double deg, PatternDirection d) {
        for (auto const& r : rows)
            if (r.theta_i_deg == deg && r.direction == d)
                return r.p_r_dbm;
        return std::nan("");
    };
    EXPECT_LT(power(rough, 70.0, PatternDirection::Specular), power(rough, 55.0, PatternDirection::Specular));
    double const gap10 = std::abs(power(rough, 10.0, PatternDirection::Incident) - power(rough, 10.0, PatternDirection::Specular));
    double const gap40 = std::abs(power(rough, 40.0, PatternDirection::Incident) - power(rough, 40.0, PatternDirection::Specular));
    EXPECT_LT(gap10, gap40);
    EXPECT_GT(power(rough, 30.0, PatternDirection::Specular), power(sweep("smooth_wall"), 30.0, PatternDirection::Specular));
    EXPECT_GT(power(sweep("smooth_wall"), 30.0, PatternDirection::Specular),
              power(sweep("metal_sheet"), 30.0, PatternDirection::Specular));
}

TEST(PatternSweep, RejectsGridOutsideOpenQuadrant)
{
    auto const db = io::default_material_database();
    std::vector<PatternDirection> const dir{PatternDirection::Specular};
    for (double bad : {0.0, 90.0, -5.0})
    {
        std::vector<double> const grid{bad};
        EXPECT_THROW(pattern_sweep(db.find("rough_wall"), LobeParams::single(0.3, 2), link28, dir, grid), DomainError);
    }
}
