#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <tuple>
#include <vector>

#include "errors.hpp"
#include "geometry.hpp"
#include "lobes.hpp"
#include "raytrace.hpp"
#include "scan.hpp"

namespace mmscatter {

/// Fraction of variance unexplained between two dB vectors:
/// sqrt(sum (m - s)^2 / sum (m - mean(m))^2).
inline double fvu(std::span<double const> measured, std::span<double const> simulated)
{
    if (measured.size() != simulated.size())
        throw InputError("fvu: vectors must have equal length");
    if (measured.size() < 2)
        throw DegenerateScan("fvu: at least two positions are required");
    double mean = 0.0;
    for (double m : measured)
    {
        if (!std::isfinite(m))
            throw InputError("fvu: measured power must be finite");
        mean += m;
    }
    mean /= static_cast<double>(measured.size());
    double num = 0.0;
    double den = 0.0;
    for (std::size_t i = 0; i < measured.size(); ++i)
    {
        double const r = measured[i] - simulated[i];
        double const d = measured[i] - mean;
        num += r * r;
        den += d * d;
    }
    if (!(den > 0.0))
        throw DegenerateScan("fvu: measured power is constant");
    if (std::isnan(num))
        return std::numeric_limits<double>::infinity();
    return std::sqrt(num / den);
}

struct SearchConfig
{
    int alpha_min = 1;
    int alpha_max = 10;
    int lambda_steps = 10;  // lambda grid k / lambda_steps
    double s_halfwidth = 0.15;
    double s_step = 0.05;
    int max_rounds = 10;
    double improvement_tol = 1e-4;
    double tie_tol = 1e-12;
};

/// Everything needed to turn lobe parameters into simulated scan powers.
struct FitContext
{
    Scene scene;
    Material material;
    double radius = 1.5;
    RadioLink link;
    SimOptions options;

    static FitContext measurement(Scene scene, Material material, double radius = 1.5,
                                  SimOptions options = {})
    {
        RadioLink link = RadioLink::measurement_default(scene.wavelength());
        return {std::move(scene), std::move(material), radius, link, options};
    }

    double incidence_angle() const
    {
        return angle_between(scene.tx - scene.wall.center, scene.wall.normal);
    }
};

struct TraceEntry
{
    int round = 0;
    char stage = 'A';  // 'A' shape search, 'B' S sweep
    LobeParams params;
    double fvu = 0.0;

    friend bool operator==(TraceEntry const&, TraceEntry const&) = default;
};

struct FitReport
{
    LobeModel model = LobeModel::SingleLobe;
    LobeParams best;
    double fvu = 0.0;
    double s_initial = 0.0;
    double lambda_prior = 0.0;
    bool plane_only = false;
    bool converged = false;
    int rounds = 0;
    std::size_t points = 0;
    std::vector<TraceEntry> trace;

    friend bool operator==(FitReport const&, FitReport const&) = default;
};

/// Prior for the mix factor, decreasing with incidence angle.
inline double lambda_prior(double theta_i)
{
    return std::clamp(1.0 - theta_i / (0.5 * pi), 0.0, 1.0);
}

namespace detail {

struct Candidate
{
    LobeParams params;
    double fvu;
};

// Strict "a is preferred over b". FVUs within tie_tol are equal; ties go to
// smaller alpha_r, smaller alpha_i, lambda nearer the prior, S nearer the
// initial value, then smaller S and smaller lambda.
inline bool preferred(Candidate const& a, Candidate const& b, double s_initial, double prior, double tie_tol)
{
    if (a.fvu < b.fvu - tie_tol)
        return true;
    if (b.fvu < a.fvu - tie_tol)
        return false;
    // Distances are compared on a 1e-9 lattice so grid points placed
    // symmetrically about the target tie despite rounding.
    auto quantized = [](double x) { return std::llround(x * 1e9); };
    auto key = [&](LobeParams const& p) {
        double const lam = p.lambda_mix.value_or(1.0);
        return std::make_tuple(p.alpha_r, p.alpha_i.value_or(0), quantized(std::abs(lam - prior)),
                               quantized(std::abs(p.s_coeff - s_initial)), p.s_coeff, lam);
    };
    return key(a.params) < key(b.params);
}

}  // namespace detail

/// Staged grid search: shape parameters at fixed S, then S around its
/// initial value at fixed shape, alternating until the FVU stops improving.
inline FitReport grid_fit(Scan const& scan, FitContext const& ctx, LobeModel model, double s_initial,
                          SearchConfig const& cfg = {}, bool plane_only = false)
{
    if (!(s_initial > 0.0 && s_initial < 1.0))
        throw DomainError("grid_fit: initial S must lie in (0, 1)");
    Scan const data = plane_only ? scan.in_plane() : scan;
    if (data.empty())
        throw DegenerateScan("grid_fit: no positions left after the in-plane filter");
    if (data.size() < 2)
        throw DegenerateScan("grid_fit: at least two positions are required");
    data.validate();
    std::vector<double> const measured = data.powers();
    {
        auto const [lo, hi] = std::minmax_element(measured.begin(), measured.end());
        if (!(*hi > *lo))
            throw DegenerateScan("grid_fit: measured power is constant");
    }

    ScanKernel const kernel(ctx.scene, ctx.material, scan_receivers(ctx.scene, ctx.radius, data), ctx.link,
                            ctx.options);

    FitReport report;
    report.model = model;
    report.s_initial = s_initial;
    report.plane_only = plane_only;
    report.points = data.size();
    report.lambda_prior = lambda_prior(ctx.incidence_angle());
    double const prior = report.lambda_prior;

    std::vector<double> s_grid;
    auto const half = static_cast<int>(std::llround(cfg.s_halfwidth / cfg.s_step));
    for (int k = -half; k <= half; ++k)
    {
        double const s = s_initial + k * cfg.s_step;
        if (s > 0.0 && s < 1.0)
            s_grid.push_back(s);
    }

    std::vector<LobeParams> shapes;
    for (int ar = cfg.alpha_min; ar <= cfg.alpha_max; ++ar)
    {
        if (model == LobeModel::SingleLobe)
        {
            shapes.push_back(LobeParams::single(s_initial, ar));
            continue;
        }
        for (int ai = cfg.alpha_min; ai <= cfg.alpha_max; ++ai)
            for (int k = 0; k <= cfg.lambda_steps; ++k)
                shapes.push_back(LobeParams::dual(s_initial, ar, ai, k / static_cast<double>(cfg.lambda_steps)));
    }

    using Key = std::tuple<double, int, int, double>;
    std::map<Key, double> memo;
    int round = 0;
    auto evaluate = [&](LobeParams const& p, char stage) {
        Key const key{p.s_coeff, p.alpha_r, p.alpha_i.value_or(0), p.lambda_mix.value_or(-1.0)};
        if (auto it = memo.find(key); it != memo.end())
            return detail::Candidate{p, it->second};
        double const f = fvu(measured, kernel.total_dbm(p));
        memo.emplace(key, f);
        report.trace.push_back({round, stage, p, f});
        return detail::Candidate{p, f};
    };
    auto better = [&](detail::Candidate const& a, detail::Candidate const& b) {
        return detail::preferred(a, b, s_initial, prior, cfg.tie_tol);
    };

    double current_s = s_initial;
    double previous = std::numeric_limits<double>::infinity();
    std::optional<detail::Candidate> best;
    for (round = 1; round <= cfg.max_rounds; ++round)
    {
        std::optional<detail::Candidate> stage_a;
        for (auto const& shape : shapes)
        {
            auto const c = evaluate(shape.with_s(current_s), 'A');
            if (!stage_a || better(c, *stage_a))
                stage_a = c;
        }
        std::optional<detail::Candidate> stage_b;
        for (double s : s_grid)
        {
            auto const c = evaluate(stage_a->params.with_s(s), 'B');
            if (!stage_b || better(c, *stage_b))
                stage_b = c;
        }
        if (better(*stage_a, *stage_b))
            stage_b = stage_a;
        best = stage_b;
        current_s = stage_b->params.s_coeff;
        report.rounds = round;
        double const improvement = previous - stage_b->fvu;
        previous = stage_b->fvu;
        if (improvement < cfg.improvement_tol)
        {
            report.converged = true;
            break;
        }
    }

    // Overall winner across everything evaluated, under the same ordering.
    for (auto const& e : report.trace)
    {
        detail::Candidate const c{e.params, e.fvu};
        if (better(c, *best))
            best = c;
    }
    report.best = best->params;
    report.fvu = best->fvu;
    return report;
}

struct ModelComparison
{
    FitReport single;
    FitReport dual;
    LobeModel winner = LobeModel::SingleLobe;
};

/// Fits both lobe models; the dual-lobe model wins only on a strictly lower FVU.
inline ModelComparison compare_models(Scan const& scan, FitContext const& ctx, double s_initial,
                                      SearchConfig const& cfg = {}, bool plane_only = false)
{
    ModelComparison out;
    out.single = grid_fit(scan, ctx, LobeModel::SingleLobe, s_initial, cfg, plane_only);
    out.dual = grid_fit(scan, ctx, LobeModel::DualLobe, s_initial, cfg, plane_only);
    out.winner = out.dual.fvu < out.single.fvu - cfg.tie_tol ? LobeModel::DualLobe : LobeModel::SingleLobe;
    return out;
}

}  // namespace mmscatter
