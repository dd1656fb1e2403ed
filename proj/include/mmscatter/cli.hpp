#pragma once

#include <CLI11.hpp>

#include <cmath>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "fitting.hpp"
#include "geometry.hpp"
#include "io.hpp"
#include "lobes.hpp"
#include "materials.hpp"
#include "raytrace.hpp"
#include "version.hpp"

namespace mmscatter::cli {

enum ExitCode : int
{
    exit_success = 0,
    exit_usage = 1,
    exit_input = 2,
    exit_numerical = 3,
};

/// Every flag of every subcommand, with the defaults of the measurement setup.
struct Settings
{
    std::string subcommand;

    std::string material;
    std::string materials_file;
    std::string scene_file;
    std::string scan_file;
    std::string out;

    double freq_ghz = 28.0;
    std::string pol = "TE";
    std::string mode = "hemisphere";
    std::string model = "single";
    bool plane_only = false;
    double tiles_m = 0.10;

    double theta_i_deg = 30.0;
    double radius = 1.5;
    double step_deg = 10.0;
    std::vector<double> heights_cm{0.0};

    std::optional<int> alpha_r;
    std::optional<int> alpha_i;
    std::optional<double> lambda;
    std::optional<double> s;
    std::optional<double> s_initial;

    std::optional<double> theta_start;  // 0 for theory, 1 for pattern
    double theta_end = 89.0;
    double theta_step = 1.0;
    std::string direction = "both";

    double p_t_dbm = 10.0;
    double g_t_dbi = 15.0;
    double g_r_dbi = 15.0;
    bool no_mask = false;
    bool no_gating = false;

    double s_step = 0.05;
    int lambda_steps = 10;
    int max_rounds = 10;
};

namespace detail {

using io::format_number;

struct Config
{
    std::vector<std::pair<std::string, std::string>> entries;
    std::vector<std::string> inputs;

    void set(std::string key, std::string value) { entries.emplace_back(std::move(key), std::move(value)); }
    void set(std::string key, double value) { set(std::move(key), format_number(value)); }

    std::string header(std::string_view subcommand) const
    {
        std::string h = "mmscatter " + std::string(version) + " " + std::string(subcommand) + "\nconfig";
        for (auto const& [k, v] : entries)
            h += " " + k + "=" + v;
        for (auto const& in : inputs)
            h += "\ninput " + in;
        return h;
    }
};

inline Polarization polarization(Settings const& s)
{
    return s.pol == "TM" || s.pol == "tm" ? Polarization::TM : Polarization::TE;
}

inline NormalizationMode normalization(Settings const& s)
{
    return s.mode == "paper-line" ? NormalizationMode::PaperLine : NormalizationMode::Hemisphere;
}

inline LobeModel lobe_model(Settings const& s)
{
    return s.model == "dual" ? LobeModel::DualLobe : LobeModel::SingleLobe;
}

inline MaterialDatabase load_materials(Settings const& s, Config& cfg)
{
    if (s.materials_file.empty())
    {
        cfg.inputs.push_back("materials=builtin sha256=" + io::sha256_hex(default_materials_text));
        return io::default_material_database();
    }
    std::string const text = io::read_file(s.materials_file);
    cfg.inputs.push_back("materials=" + s.materials_file + " sha256=" + io::sha256_hex(text));
    return io::parse_materials(text);
}

/// Lobe shape from the flags; unset width factors and mix take the presets
/// used for the incidence sweeps.
inline LobeParams lobe_shape(Settings const& s, double s_coeff, Config& cfg)
{
    LobeParams p;
    if (lobe_model(s) == LobeModel::SingleLobe)
    {
        if (s.alpha_i || s.lambda)
            throw DomainError("--alpha-i and --lambda apply to the dual-lobe model only");
        p = LobeParams::single(s_coeff, s.alpha_r.value_or(4));
    }
    else
        p = LobeParams::dual(s_coeff, s.alpha_r.value_or(1), s.alpha_i.value_or(10), s.lambda.value_or(0.2));
    cfg.set("model", to_string(p.model));
    cfg.set("alpha_r", std::to_string(p.alpha_r));
    if (p.alpha_i)
        cfg.set("alpha_i", std::to_string(*p.alpha_i));
    if (p.lambda_mix)
        cfg.set("lambda", *p.lambda_mix);
    return p;
}

struct ResolvedScene
{
    Scene scene;
    ScanSpec spec;
    Material material;
    double theta_i = 0.0;  // rad
};

inline ResolvedScene resolve_scene(Settings const& s, MaterialDatabase const& db, CLI::App const& sub,
                                   Config& cfg)
{
    ResolvedScene r;
    if (!s.scene_file.empty())
    {
        std::string const text = io::read_file(s.scene_file);
        cfg.inputs.push_back("scene=" + s.scene_file + " sha256=" + io::sha256_hex(text));
        io::SceneFile const f = io::parse_scene(text);
        r.scene = f.scene;
        r.spec = f.scan.value_or(ScanSpec::arc());
    }
    else
    {
        std::string const name = s.material.empty() ? "metal_sheet" : s.material;
        r.scene = Scene::measurement(name, s.theta_i_deg, s.freq_ghz * 1e9);
        r.spec = ScanSpec::arc();
    }
    if (sub.count("--radius") > 0)
        r.spec.radius = s.radius;
    // fit takes its positions from the scan file
    bool const own_positions = sub.get_option_no_throw("--step-deg") != nullptr;
    if (own_positions && sub.count("--step-deg") > 0)
        r.spec.azimuth_step_deg = s.step_deg;
    if (own_positions && sub.count("--heights-cm") > 0)
    {
        r.spec.height_offsets.clear();
        for (double h : s.heights_cm)
            r.spec.height_offsets.push_back(io::file_cm_to_meters(h));
    }
    r.spec.validate();
    r.material = db.find(r.scene.wall.material);
    r.theta_i = angle_between(r.scene.tx - r.scene.wall.center, r.scene.wall.normal);

    cfg.set("material", r.material.name);
    cfg.set("theta_i_deg", rad_to_deg(r.theta_i));
    cfg.set("freq_ghz", r.scene.carrier_frequency / 1e9);
    cfg.set("radius_m", r.spec.radius);
    if (!own_positions)
        return r;
    cfg.set("step_deg", r.spec.azimuth_step_deg);
    std::string heights;
    for (double h : r.spec.height_offsets)
        heights += (heights.empty() ? "" : ",") + format_number(io::meters_to_file_cm(h));
    cfg.set("heights_cm", heights);
    return r;
}

inline SimOptions sim_options(Settings const& s, Config& cfg)
{
    SimOptions o;
    o.tile_edge = s.tiles_m;
    o.mode = normalization(s);
    o.polarization = polarization(s);
    o.tx_mask.enabled = !s.no_mask;
    o.rx_mask.enabled = !s.no_mask;
    o.gating = !s.no_gating;
    cfg.set("pol", polarization(s) == Polarization::TE ? "TE" : "TM");
    cfg.set("mode", to_string(o.mode));
    cfg.set("tiles_m", o.tile_edge);
    cfg.set("mask", s.no_mask ? "off" : "on");
    cfg.set("gating", s.no_gating ? "off" : "on");
    return o;
}

inline RadioLink radio_link(Settings const& s, double wavelength, Config& cfg)
{
    cfg.set("p_t_dbm", s.p_t_dbm);
    cfg.set("g_t_dbi", s.g_t_dbi);
    cfg.set("g_r_dbi", s.g_r_dbi);
    return RadioLink::from_db(s.p_t_dbm, s.g_t_dbi, s.g_r_dbi, wavelength);
}

inline std::vector<double> theta_grid(Settings const& s, double default_start)
{
    double const start = s.theta_start.value_or(default_start);
    if (!(s.theta_step > 0.0) || !(s.theta_end >= start))
        throw DomainError("angle grid: step must be positive and the range nonempty");
    auto const n = static_cast<std::size_t>(std::floor((s.theta_end - start) / s.theta_step + 1e-9));
    std::vector<double> out;
    for (std::size_t k = 0; k <= n; ++k)
        out.push_back(start + static_cast<double>(k) * s.theta_step);
    return out;
}

inline void emit(Settings const& s, std::string const& text, std::ostream& out)
{
    if (s.out.empty() || s.out == "-")
        out << text;
    else
        io::write_file(s.out, text);
}

inline int run_theory(Settings const& s, std::ostream& out)
{
    Config cfg;
    MaterialDatabase const db = load_materials(s, cfg);
    std::vector<Material> selected;
    if (s.material.empty())
        selected = db.all();
    else
        selected.push_back(db.find(s.material));
    double const wavelength = wavelength_from_frequency(s.freq_ghz * 1e9);
    std::string names;
    for (auto const& m : selected)
        names += (names.empty() ? "" : ",") + m.name;
    cfg.set("material", names);
    cfg.set("freq_ghz", s.freq_ghz);
    cfg.set("pol", polarization(s) == Polarization::TE ? "TE" : "TM");
    cfg.set("theta_start_deg", s.theta_start.value_or(0.0));
    cfg.set("theta_end_deg", s.theta_end);
    cfg.set("theta_step_deg", s.theta_step);

    std::vector<io::TheoryRow> rows;
    for (auto const& m : selected)
        for (double deg : theta_grid(s, 0.0))
        {
            IncidenceContext const ctx{deg_to_rad(deg), wavelength, polarization(s)};
            rows.push_back({m.name, deg, initial_scattering_coefficient(m, ctx)});
        }
    emit(s, io::format_theory(rows, cfg.header("theory")), out);
    return exit_success;
}

inline int run_pattern(Settings const& s, std::ostream& out)
{
    Config cfg;
    MaterialDatabase const db = load_materials(s, cfg);
    Material const& material = db.find(s.material.empty() ? "rough_wall" : s.material);
    double const wavelength = wavelength_from_frequency(s.freq_ghz * 1e9);
    cfg.set("material", material.name);
    cfg.set("freq_ghz", s.freq_ghz);
    LobeParams const shape = lobe_shape(s, s.s.value_or(0.5), cfg);
    cfg.set("s", s.s ? format_number(*s.s) : std::string("theory"));
    cfg.set("pol", polarization(s) == Polarization::TE ? "TE" : "TM");
    cfg.set("mode", to_string(normalization(s)));
    cfg.set("direction", s.direction);
    cfg.set("theta_start_deg", s.theta_start.value_or(1.0));
    cfg.set("theta_end_deg", s.theta_end);
    cfg.set("theta_step_deg", s.theta_step);
    RadioLink const link = radio_link(s, wavelength, cfg);

    std::vector<PatternDirection> dirs;
    if (s.direction != "specular")
        dirs.push_back(PatternDirection::Incident);
    if (s.direction != "incident")
        dirs.push_back(PatternDirection::Specular);
    PatternOptions opts;
    opts.mode = normalization(s);
    opts.polarization = polarization(s);
    opts.s_override = s.s;
    std::vector<double> const grid = theta_grid(s, 1.0);
    auto const rows = pattern_sweep(material, shape, link, dirs, grid, opts);
    emit(s, io::format_pattern(rows, shape.model, material.name, cfg.header("pattern")), out);
    return exit_success;
}

inline int run_simulate(Settings const& s, CLI::App const& sub, std::ostream& out)
{
    Config cfg;
    MaterialDatabase const db = load_materials(s, cfg);
    ResolvedScene const r = resolve_scene(s, db, sub, cfg);
    double const s_coeff = s.s.value_or(
        initial_scattering_coefficient(r.material, {r.theta_i, r.scene.wavelength(), polarization(s)}).s_coeff);
    LobeParams const params = lobe_shape(s, s_coeff, cfg);
    cfg.set("s", s_coeff);
    SimOptions const opts = sim_options(s, cfg);
    RadioLink const link = radio_link(s, r.scene.wavelength(), cfg);
    SimulatedScan const sim = simulate_scan(r.scene, db, r.spec, params, link, opts);
    emit(s, io::format_simulated_scan(sim, cfg.header("simulate")), out);
    return exit_success;
}

inline int run_fit(Settings const& s, CLI::App const& sub, std::ostream& out, std::ostream& err)
{
    Config cfg;
    MaterialDatabase const db = load_materials(s, cfg);
    std::string const scan_text = io::read_file(s.scan_file);
    cfg.inputs.push_back("scan=" + s.scan_file + " sha256=" + io::sha256_hex(scan_text));
    Scan const scan = io::parse_scan(scan_text);
    ResolvedScene const r = resolve_scene(s, db, sub, cfg);
    double const s_initial = s.s_initial.value_or(
        initial_scattering_coefficient(r.material, {r.theta_i, r.scene.wavelength(), polarization(s)}).s_coeff);
    cfg.set("model", s.model);
    cfg.set("s_initial", s_initial);
    cfg.set("plane_only", s.plane_only ? "true" : "false");
    cfg.set("s_step", s.s_step);
    cfg.set("lambda_steps", std::to_string(s.lambda_steps));
    cfg.set("max_rounds", std::to_string(s.max_rounds));
    SimOptions const opts = sim_options(s, cfg);
    RadioLink const link = radio_link(s, r.scene.wavelength(), cfg);

    FitContext const ctx{r.scene, r.material, r.spec.radius, link, opts};
    SearchConfig search;
    search.s_step = s.s_step;
    search.lambda_steps = s.lambda_steps;
    search.max_rounds = s.max_rounds;
    FitReport const report = grid_fit(scan, ctx, lobe_model(s), s_initial, search, s.plane_only);
    emit(s, io::format_report(report, cfg.header("fit")), out);
    if (!report.converged)
    {
        err << "mmscatter: fit did not converge within " << report.rounds << " rounds\n";
        return exit_numerical;
    }
    return exit_success;
}

inline int run_angles(Settings const& s, CLI::App const& sub, std::ostream& out)
{
    Config cfg;
    MaterialDatabase const db = load_materials(s, cfg);
    ResolvedScene const r = resolve_scene(s, db, sub, cfg);
    std::vector<io::AngleRow> rows;
    for (auto const& p : scan_positions(r.scene, r.spec))
    {
        io::AngleRow row;
        row.azimuth_deg = p.azimuth_deg;
        row.delta_h = p.delta_h;
        row.center = patch_angles(r.scene.tx, p.position, r.scene.wall.center, r.scene.wall.normal);
        auto const sp = specular_point(r.scene.tx, p.position, r.scene.wall);
        row.specular_on_wall = sp && r.scene.wall.contains(*sp);
        rows.push_back(row);
    }
    emit(s, io::format_angles(rows, cfg.header("angles")), out);
    return exit_success;
}

}  // namespace detail

/// Parses `args` (without the program name), runs the subcommand and returns
/// the process exit code. Help and usage errors go to `out` and `err`.
inline int run(std::vector<std::string> const& args, std::ostream& out, std::ostream& err)
{
    Settings s;
    CLI::App app{"Diffuse scattering of building surfaces at millimeter-wave frequencies", "mmscatter"};
    app.set_version_flag("--version", std::string(version));
    app.require_subcommand(1);

    auto* theory = app.add_subcommand("theory", "Reflection and scattering coefficients versus incidence angle");
    auto* pattern = app.add_subcommand("pattern", "Scattered power in the incident and specular directions");
    auto* simulate = app.add_subcommand("simulate", "Simulate a receiver scan in front of a wall");
    auto* fit = app.add_subcommand("fit", "Fit lobe parameters to a measured scan");
    auto* angles = app.add_subcommand("angles", "Path angles via the wall center for each scan position");
    std::vector<CLI::App*> const all{theory, pattern, simulate, fit, angles};
    std::vector<CLI::App*> const scene_based{simulate, fit, angles};
    std::vector<CLI::App*> const lobe_based{pattern, simulate};
    std::vector<CLI::App*> const sim_based{simulate, fit};

    auto const model_names = CLI::IsMember({"single", "dual"});
    auto const mode_names = CLI::IsMember({"hemisphere", "paper-line"});
    auto const pol_names = CLI::IsMember({"TE", "TM"}, CLI::ignore_case);

    for (auto* sub : all)
    {
        sub->add_option("--material", s.material, "Material name from the database");
        sub->add_option("--materials-file", s.materials_file, "Material file replacing the built-in database");
        sub->add_option("--out", s.out, "Output path; standard output when omitted");
        sub->add_option("--pol", s.pol, "Polarization, TE or TM")->check(pol_names)->capture_default_str();
    }
    for (auto* sub : {theory, pattern})
    {
        sub->add_option("--freq-ghz", s.freq_ghz, "Carrier frequency in GHz")
            ->check(CLI::PositiveNumber)
            ->capture_default_str();
        sub->add_option("--theta-start", s.theta_start, "First incidence angle in degrees (0 theory, 1 pattern)");
        sub->add_option("--theta-end", s.theta_end, "Last incidence angle in degrees")->capture_default_str();
        sub->add_option("--theta-step", s.theta_step, "Incidence angle step in degrees")
            ->check(CLI::PositiveNumber)
            ->capture_default_str();
    }

    for (auto* sub : scene_based)
    {
        auto* scene = sub->add_option("--scene", s.scene_file, "Scene file with wall, transmitter and scan");
        sub->add_option("--freq-ghz", s.freq_ghz, "Carrier frequency in GHz")
            ->check(CLI::PositiveNumber)
            ->capture_default_str()
            ->excludes(scene);
        sub->add_option("--theta-i", s.theta_i_deg, "Incidence angle of the transmitter in degrees")
            ->check(CLI::Range(0.0, 89.0))
            ->capture_default_str()
            ->excludes(scene);
        sub->get_option("--material")->excludes(scene);
        sub->add_option("--radius", s.radius, "Receiver arc radius in meters")
            ->check(CLI::PositiveNumber)
            ->capture_default_str();
    }
    for (auto* sub : {simulate, angles})
    {
        sub->add_option("--step-deg", s.step_deg, "Azimuth step of the scan in degrees")
            ->check(CLI::PositiveNumber)
            ->capture_default_str();
        sub->add_option("--heights-cm", s.heights_cm, "Receiver height offsets in cm, comma separated")
            ->delimiter(',')
            ->capture_default_str();
    }
    for (auto* sub : lobe_based)
    {
        sub->add_option("--model", s.model, "Lobe model, single or dual")->check(model_names)->capture_default_str();
        sub->add_option("--alpha-r", s.alpha_r, "Forward lobe width factor (default 4 single, 1 dual)")
            ->check(CLI::Range(min_width_factor, max_width_factor));
        sub->add_option("--alpha-i", s.alpha_i, "Backscatter lobe width factor (default 10)")
            ->check(CLI::Range(min_width_factor, max_width_factor));
        sub->add_option("--lambda", s.lambda, "Forward share of the dual lobe (default 0.2)")
            ->check(CLI::Range(0.0, 1.0));
        sub->add_option("--s", s.s, "Scattering coefficient; theoretical value when omitted")
            ->check(CLI::Range(0.0, 0.999999));
    }
    for (auto* sub : {pattern, simulate, fit})
    {
        sub->add_option("--mode", s.mode, "Lobe normalization, hemisphere or paper-line")
            ->check(mode_names)
            ->capture_default_str();
        sub->add_option("--p-t-dbm", s.p_t_dbm, "Transmit power in dBm")->capture_default_str();
        sub->add_option("--g-t-dbi", s.g_t_dbi, "Transmit antenna gain in dBi")->capture_default_str();
        sub->add_option("--g-r-dbi", s.g_r_dbi, "Receive antenna gain in dBi")->capture_default_str();
    }
    pattern->add_option("--direction", s.direction, "Directions to report: both, incident or specular")
        ->check(CLI::IsMember({"both", "incident", "specular"}))
        ->capture_default_str();
    for (auto* sub : sim_based)
    {
        sub->add_option("--tiles-m", s.tiles_m, "Tile edge of the wall discretization in meters")
            ->check(CLI::Range(1e-3, 10.0))
            ->capture_default_str();
        sub->add_flag("--no-mask", s.no_mask, "Use isotropic antennas instead of the main-beam mask");
        sub->add_flag("--no-gating", s.no_gating, "Keep paths below the power floor or beyond the delay window");
    }
    fit->add_option("--scan", s.scan_file, "Measured scan CSV")->required();
    fit->add_option("--model", s.model, "Lobe model, single or dual")->check(model_names)->capture_default_str();
    fit->add_option("--s-initial", s.s_initial, "Center of the S search; theoretical value when omitted")
        ->check(CLI::Range(1e-6, 0.999999));
    fit->add_flag("--plane-only", s.plane_only, "Fit only the positions at zero height offset");
    fit->add_option("--s-step", s.s_step, "Step of the S search")->check(CLI::Range(1e-4, 0.15))->capture_default_str();
    fit->add_option("--lambda-steps", s.lambda_steps, "Number of intervals of the mix-factor grid")
        ->check(CLI::Range(1, 100))
        ->capture_default_str();
    fit->add_option("--max-rounds", s.max_rounds, "Maximum number of alternation rounds")
        ->check(CLI::Range(1, 1000))
        ->capture_default_str();

    try
    {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    }
    catch (CLI::ParseError const& e)
    {
        int const code = app.exit(e, out, err);
        return code == 0 ? exit_success : exit_usage;
    }

    try
    {
        if (theory->parsed())
            return detail::run_theory(s, out);
        if (pattern->parsed())
            return detail::run_pattern(s, out);
        if (simulate->parsed())
            return detail::run_simulate(s, *simulate, out);
        if (fit->parsed())
            return detail::run_fit(s, *fit, out, err);
        return detail::run_angles(s, *angles, out);
    }
    catch (DomainError const& e)
    {
        err << "mmscatter: " << e.what() << '\n';
        return exit_usage;
    }
    catch (NumericalError const& e)
    {
        err << "mmscatter: " << e.what() << '\n';
        return exit_numerical;
    }
    catch (Error const& e)
    {
        err << "mmscatter: " << e.what() << '\n';
        return exit_input;
    }
    catch (std::exception const& e)
    {
        err << "mmscatter: " << e.what() << '\n';
        return exit_numerical;
    }
}

}  // namespace mmscatter::cli
