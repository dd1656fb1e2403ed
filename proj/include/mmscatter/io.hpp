#pragma once

#include <openssl/evp.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "errors.hpp"
#include "fitting.hpp"
#include "geometry.hpp"
#include "lobes.hpp"
#include "materials.hpp"
#include "raytrace.hpp"
#include "scan.hpp"

namespace mmscatter::io {

//---------------------------------------------------------------------------//
// Text helpers
//---------------------------------------------------------------------------//

/// Shortest decimal text that reads back to the same double; locale-free.
inline std::string format_number(double v)
{
    char buf[64];
    auto const res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

inline std::string_view trim(std::string_view s)
{
    auto const is_space = [](char c) { return c == ' ' || c == '\t'; };
    while (!s.empty() && is_space(s.front()))
        s.remove_prefix(1);
    while (!s.empty() && is_space(s.back()))
        s.remove_suffix(1);
    return s;
}

/// Parses the whole token as a double; anything left over is an error.
inline double parse_number(std::string_view text, std::size_t line, std::string_view what)
{
    std::string_view const t = trim(text);
    double v = 0.0;
    auto const res = std::from_chars(t.data(), t.data() + t.size(), v);
    if (t.empty() || res.ec != std::errc{} || res.ptr != t.data() + t.size())
        throw ParseError(line, "invalid number for " + std::string(what) + ": '" + std::string(text) + "'");
    return v;
}

inline int parse_int(std::string_view text, std::size_t line, std::string_view what)
{
    std::string_view const t = trim(text);
    int v = 0;
    auto const res = std::from_chars(t.data(), t.data() + t.size(), v);
    if (t.empty() || res.ec != std::errc{} || res.ptr != t.data() + t.size())
        throw ParseError(line, "invalid integer for " + std::string(what) + ": '" + std::string(text) + "'");
    return v;
}

inline std::vector<std::string_view> split(std::string_view s, char sep)
{
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true)
    {
        auto const pos = s.find(sep, start);
        if (pos == std::string_view::npos)
        {
            out.push_back(s.substr(start));
            return out;
        }
        out.push_back(s.substr(start, pos - start));
        start = pos + 1;
    }
}

inline std::vector<std::string_view> split_ws(std::string_view s)
{
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < s.size())
    {
        while (i < s.size() && (s[i] == ' ' || s[i] == '\t'))
            ++i;
        std::size_t j = i;
        while (j < s.size() && s[j] != ' ' && s[j] != '\t')
            ++j;
        if (j > i)
            out.push_back(s.substr(i, j - i));
        i = j;
    }
    return out;
}

/// Lines of a text, numbered from 1, without the LF terminator.
inline std::vector<std::pair<std::size_t, std::string_view>> lines_of(std::string_view text)
{
    std::vector<std::pair<std::size_t, std::string_view>> out;
    std::size_t number = 1;
    std::size_t start = 0;
    while (start < text.size())
    {
        auto pos = text.find('\n', start);
        if (pos == std::string_view::npos)
            pos = text.size();
        out.emplace_back(number++, text.substr(start, pos - start));
        start = pos + 1;
    }
    return out;
}

inline bool is_skippable(std::string_view line)
{
    auto const t = trim(line);
    return t.empty() || t.front() == '#';
}

inline std::string read_file(std::string const& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw InputError("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void write_file(std::string const& path, std::string const& content)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw InputError("cannot write '" + path + "'");
    out << content;
    out.flush();
    if (!out)
        throw InputError("write to '" + path + "' failed");
}

inline std::string sha256_hex(std::string_view data)
{
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1)
        throw Error("sha256 digest failed");
    std::string hex;
    char buf[3];
    for (unsigned int i = 0; i < len; ++i)
    {
        std::snprintf(buf, sizeof(buf), "%02x", digest[i]);
        hex += buf;
    }
    return hex;
}

// Scan files carry heights in centimeters. Rounding to 1e-9 cm keeps values
// such as 0.3 m printing as "30" and reading back to the same double.
inline double meters_to_file_cm(double m) { return std::round(m * 100.0 * 1e9) / 1e9; }
namespace detail {

// Scales a decimal token by a power of ten through the text itself, so
// "0.715" mm becomes exactly the double nearest 0.715e-3.
inline double scaled_decimal(std::string_view token, int exponent, std::size_t line, std::string_view what)
{
    double const plain = parse_number(token, line, what);
    if (exponent == 0)
        return plain;
    std::string const t(trim(token));
    if (t.find_first_of("eEnN") != std::string::npos)
        return plain * std::pow(10.0, exponent);
    return parse_number(t + "e" + std::to_string(exponent), line, what);
}

}  // namespace detail

/// Height field of a file, in cm, as meters; exact for decimal input.
inline double file_cm_to_meters(std::string_view token, std::size_t line, std::string_view what)
{
    return detail::scaled_decimal(token, -2, line, what);
}

inline double file_cm_to_meters(double cm) { return file_cm_to_meters(format_number(cm), 0, "height"); }

inline void write_header_comment(std::ostream& os, std::string_view header)
{
    if (header.empty())
        return;
    for (auto const& [n, line] : lines_of(header))
        os << "# " << line << '\n';
}

//---------------------------------------------------------------------------//
// Scan files
//---------------------------------------------------------------------------//

inline constexpr std::string_view scan_header = "angle_deg,delta_h_cm,power_dbm";
inline constexpr std::string_view simulated_scan_header
    = "angle_deg,delta_h_cm,power_dbm,specular_dbm,diffuse_dbm";

inline Scan parse_scan(std::string_view text)
{
    Scan scan;
    std::vector<std::size_t> line_of_point;
    std::size_t columns = 0;
    for (auto const& [n, line] : lines_of(text))
    {
        if (is_skippable(line))
            continue;
        if (columns == 0)
        {
            if (line == simulated_scan_header)
                columns = 5;
            else if (line == scan_header)
                columns = 3;
            else
                throw ParseError(n, "expected header '" + std::string(scan_header) + "'");
            continue;
        }
        auto const fields = split(line, ',');
        if (fields.size() != columns)
            throw ParseError(n, "expected " + std::to_string(columns) + " fields, found "
                                    + std::to_string(fields.size()));
        ScanPoint p;
        p.azimuth_deg = parse_number(fields[0], n, "angle_deg");
        p.delta_h = file_cm_to_meters(fields[1], n, "delta_h_cm");
        p.power_dbm = parse_number(fields[2], n, "power_dbm");
        for (std::size_t c = 3; c < columns; ++c)
            parse_number(fields[c], n, "power column");
        if (!(p.azimuth_deg >= -90.0 && p.azimuth_deg <= 90.0))
            throw ParseError(n, "angle_deg must lie in [-90, 90]");
        if (!std::isfinite(p.delta_h))
            throw ParseError(n, "delta_h_cm must be finite");
        for (std::size_t i = 0; i < scan.points.size(); ++i)
            if (same_position(scan.points[i], p))
                throw ParseError(n, "duplicate position (" + format_number(p.azimuth_deg) + ", "
                                        + format_number(meters_to_file_cm(p.delta_h)) + " cm), first on line "
                                        + std::to_string(line_of_point[i]));
        scan.points.push_back(p);
        line_of_point.push_back(n);
    }
    if (columns == 0)
        throw InputError("scan file is empty");
    if (scan.points.empty())
        throw InputError("scan file has a header but no records");
    return scan;
}

inline Scan read_scan(std::string const& path) { return parse_scan(read_file(path)); }

inline std::string format_scan(Scan const& scan, std::string_view header = {})
{
    std::ostringstream os;
    write_header_comment(os, header);
    os << scan_header << '\n';
    for (auto const& p : scan.points)
        os << format_number(p.azimuth_deg) << ',' << format_number(meters_to_file_cm(p.delta_h)) << ','
           << format_number(p.power_dbm) << '\n';
    return os.str();
}

inline void write_scan(Scan const& scan, std::string const& path, std::string_view header = {})
{
    write_file(path, format_scan(scan, header));
}

inline std::string format_simulated_scan(SimulatedScan const& sim, std::string_view header = {})
{
    std::ostringstream os;
    write_header_comment(os, header);
    os << simulated_scan_header << '\n';
    for (auto const& p : sim.points)
        os << format_number(p.azimuth_deg) << ',' << format_number(meters_to_file_cm(p.delta_h)) << ','
           << format_number(p.total_dbm) << ',' << format_number(p.specular_dbm) << ','
           << format_number(p.diffuse_dbm) << '\n';
    return os.str();
}

//---------------------------------------------------------------------------//
// Material files
//---------------------------------------------------------------------------//

namespace detail {

// "<number> [mm|cm|m]"; a missing unit falls back to `default_exponent`.
inline double parse_length(std::string_view value, std::optional<int> default_exponent, std::size_t line,
                           std::string_view what)
{
    auto const parts = split_ws(value);
    if (parts.empty() || parts.size() > 2)
        throw ParseError(line, "invalid length for " + std::string(what) + ": '" + std::string(value) + "'");
    int exponent = 0;
    if (parts.size() == 2)
    {
        if (parts[1] == "mm")
            exponent = -3;
        else if (parts[1] == "cm")
            exponent = -2;
        else if (parts[1] == "m")
            exponent = 0;
        else
            throw ParseError(line, "unknown unit '" + std::string(parts[1]) + "' for " + std::string(what));
    }
    else if (default_exponent)
        exponent = *default_exponent;
    else
        throw ParseError(line, std::string(what) + " requires a unit suffix (mm, cm or m)");
    return scaled_decimal(parts[0], exponent, line, what);
}

}  // namespace detail

/// One record per line: `name=...; eps_r=...; h_rms_mm=...; thickness_cm=...`.
/// `h_rms` and `thickness` keys take an explicit unit; the `_mm`/`_cm` keys
/// default to their unit but honor a suffix.
inline MaterialDatabase parse_materials(std::string_view text)
{
    MaterialDatabase db;
    for (auto const& [n, line] : lines_of(text))
    {
        if (is_skippable(line))
            continue;
        std::map<std::string, std::string_view, std::less<>> fields;
        for (auto field : split(line, ';'))
        {
            field = trim(field);
            if (field.empty())
                continue;
            auto const eq = field.find('=');
            if (eq == std::string_view::npos)
                throw ParseError(n, "expected key=value, found '" + std::string(field) + "'");
            std::string key(trim(field.substr(0, eq)));
            if (fields.contains(key))
                throw ParseError(n, "duplicate key '" + key + "'");
            fields.emplace(std::move(key), trim(field.substr(eq + 1)));
        }

        Material m;
        bool has_name = false, has_eps = false, has_h = false, has_t = false;
        for (auto const& [key, value] : fields)
        {
            if (key == "name")
            {
                if (value.empty() || value.find_first_of(" \t,") != std::string_view::npos)
                    throw ParseError(n, "material name must be a nonempty identifier");
                m.name = std::string(value);
                has_name = true;
            }
            else if (key == "eps_r")
            {
                m.eps_r = parse_number(value, n, "eps_r");
                has_eps = true;
            }
            else if (key == "h_rms_mm" || key == "h_rms")
            {
                if (has_h)
                    throw ParseError(n, "h_rms given twice");
                m.h_rms = detail::parse_length(value, key == "h_rms_mm" ? std::optional<int>(-3) : std::nullopt,
                                               n, key);
                has_h = true;
            }
            else if (key == "thickness_cm" || key == "thickness")
            {
                if (has_t)
                    throw ParseError(n, "thickness given twice");
                m.thickness = detail::parse_length(
                    value, key == "thickness_cm" ? std::optional<int>(-2) : std::nullopt, n, key);
                has_t = true;
            }
            else
                throw ParseError(n, "unknown key '" + key + "'");
        }
        if (!has_name || !has_eps || !has_h || !has_t)
            throw ParseError(n, "record requires name, eps_r, h_rms_mm and thickness_cm");
        try
        {
            db.add(m);
        }
        catch (InputError const& e)
        {
            throw ParseError(n, e.what());
        }
    }
    return db;
}

inline MaterialDatabase read_materials(std::string const& path) { return parse_materials(read_file(path)); }

inline MaterialDatabase default_material_database() { return parse_materials(default_materials_text); }

//---------------------------------------------------------------------------//
// Scene files
//---------------------------------------------------------------------------//

struct SceneFile
{
    Scene scene;
    std::optional<ScanSpec> scan;
};

/// `key = value` lines: wall.center, wall.normal (3 numbers each),
/// wall.width_m, wall.height_m, wall.material, tx (3 numbers),
/// frequency_ghz, and optionally scan.radius_m, scan.step_deg,
/// scan.start_deg, scan.end_deg, scan.heights_cm (list).
inline SceneFile parse_scene(std::string_view text)
{
    std::map<std::string, std::pair<std::size_t, std::string_view>, std::less<>> kv;
    for (auto const& [n, line] : lines_of(text))
    {
        if (is_skippable(line))
            continue;
        auto const eq = line.find('=');
        if (eq == std::string_view::npos)
            throw ParseError(n, "expected key = value");
        std::string key(trim(line.substr(0, eq)));
        if (kv.contains(key))
            throw ParseError(n, "duplicate key '" + key + "'");
        kv.emplace(std::move(key), std::make_pair(n, trim(line.substr(eq + 1))));
    }

    static constexpr std::string_view known[] = {
        "wall.center", "wall.normal", "wall.width_m", "wall.height_m", "wall.material", "tx",
        "frequency_ghz", "scan.radius_m", "scan.step_deg", "scan.start_deg", "scan.end_deg", "scan.heights_cm"};
    for (auto const& [key, entry] : kv)
        if (std::find(std::begin(known), std::end(known), key) == std::end(known))
            throw ParseError(entry.first, "unknown key '" + key + "'");

    auto require = [&](std::string_view key) -> std::pair<std::size_t, std::string_view> {
        auto it = kv.find(key);
        if (it == kv.end())
            throw InputError("scene file is missing '" + std::string(key) + "'");
        return it->second;
    };
    auto number = [&](std::string_view key) {
        auto const [n, v] = require(key);
        return parse_number(v, n, key);
    };
    auto vec3 = [&](std::string_view key) {
        auto const [n, v] = require(key);
        auto const parts = split_ws(v);
        if (parts.size() != 3)
            throw ParseError(n, std::string(key) + " needs three numbers");
        return Vec3{parse_number(parts[0], n, key), parse_number(parts[1], n, key), parse_number(parts[2], n, key)};
    };

    SceneFile out;
    out.scene.wall.center = vec3("wall.center");
    out.scene.wall.normal = vec3("wall.normal");
    out.scene.wall.width = number("wall.width_m");
    out.scene.wall.height = number("wall.height_m");
    out.scene.wall.material = std::string(require("wall.material").second);
    out.scene.tx = vec3("tx");
    out.scene.carrier_frequency = number("frequency_ghz") * 1e9;
    out.scene.validate();

    bool const any_scan = std::any_of(kv.begin(), kv.end(), [](auto const& e) { return e.first.starts_with("scan."); });
    if (any_scan)
    {
        ScanSpec spec;
        if (kv.contains("scan.radius_m"))
            spec.radius = number("scan.radius_m");
        if (kv.contains("scan.step_deg"))
            spec.azimuth_step_deg = number("scan.step_deg");
        if (kv.contains("scan.start_deg"))
            spec.azimuth_start_deg = number("scan.start_deg");
        if (kv.contains("scan.end_deg"))
            spec.azimuth_end_deg = number("scan.end_deg");
        if (kv.contains("scan.heights_cm"))
        {
            auto const [n, v] = require("scan.heights_cm");
            spec.height_offsets.clear();
            for (auto part : split_ws(v))
                spec.height_offsets.push_back(file_cm_to_meters(part, n, "scan.heights_cm"));
        }
        spec.validate();
        out.scan = spec;
    }
    return out;
}

inline SceneFile read_scene(std::string const& path) { return parse_scene(read_file(path)); }

inline std::string format_scene(SceneFile const& f)
{
    auto v3 = [](Vec3 v) { return format_number(v.x) + " " + format_number(v.y) + " " + format_number(v.z); };
    Scene const& s = f.scene;
    std::ostringstream os;
    os << "wall.center = " << v3(s.wall.center) << '\n'
       << "wall.normal = " << v3(s.wall.normal) << '\n'
       << "wall.width_m = " << format_number(s.wall.width) << '\n'
       << "wall.height_m = " << format_number(s.wall.height) << '\n'
       << "wall.material = " << s.wall.material << '\n'
       << "tx = " << v3(s.tx) << '\n'
       << "frequency_ghz = " << format_number(s.carrier_frequency / 1e9) << '\n';
    if (f.scan)
    {
        os << "scan.radius_m = " << format_number(f.scan->radius) << '\n'
           << "scan.step_deg = " << format_number(f.scan->azimuth_step_deg) << '\n'
           << "scan.start_deg = " << format_number(f.scan->azimuth_start_deg) << '\n'
           << "scan.end_deg = " << format_number(f.scan->azimuth_end_deg) << '\n'
           << "scan.heights_cm =";
        for (double h : f.scan->height_offsets)
            os << ' ' << format_number(meters_to_file_cm(h));
        os << '\n';
    }
    return os.str();
}

//---------------------------------------------------------------------------//
// Fit reports
//---------------------------------------------------------------------------//

inline constexpr std::string_view trace_header = "round,stage,s,alpha_r,alpha_i,lambda,fvu";

inline std::string format_report(FitReport const& r, std::string_view header = {})
{
    auto opt_int = [](std::optional<int> v) { return v ? std::to_string(*v) : std::string("-"); };
    auto opt_num = [](std::optional<double> v) { return v ? format_number(*v) : std::string("-"); };
    std::ostringstream os;
    write_header_comment(os, header);
    os << "model = " << to_string(r.model) << '\n'
       << "fvu = " << format_number(r.fvu) << '\n'
       << "s_initial = " << format_number(r.s_initial) << '\n'
       << "best.s = " << format_number(r.best.s_coeff) << '\n'
       << "best.alpha_r = " << r.best.alpha_r << '\n'
       << "best.alpha_i = " << opt_int(r.best.alpha_i) << '\n'
       << "best.lambda = " << opt_num(r.best.lambda_mix) << '\n'
       << "lambda_prior = " << format_number(r.lambda_prior) << '\n'
       << "plane_only = " << (r.plane_only ? "true" : "false") << '\n'
       << "converged = " << (r.converged ? "true" : "false") << '\n'
       << "rounds = " << r.rounds << '\n'
       << "points = " << r.points << '\n'
       << "trace_rows = " << r.trace.size() << '\n'
       << "[trace]\n"
       << trace_header << '\n';
    for (auto const& e : r.trace)
        os << e.round << ',' << e.stage << ',' << format_number(e.params.s_coeff) << ',' << e.params.alpha_r << ','
           << opt_int(e.params.alpha_i) << ',' << opt_num(e.params.lambda_mix) << ',' << format_number(e.fvu)
           << '\n';
    return os.str();
}

inline void write_report(FitReport const& report, std::string const& path, std::string_view header = {})
{
    write_file(path, format_report(report, header));
}

inline FitReport parse_report(std::string_view text)
{
    FitReport r;
    std::map<std::string, std::pair<std::size_t, std::string_view>, std::less<>> kv;
    bool in_trace = false;
    bool seen_trace_header = false;
    std::optional<LobeModel> model;
    auto parse_model = [](std::string_view v, std::size_t n) {
        if (v == "single")
            return LobeModel::SingleLobe;
        if (v == "dual")
            return LobeModel::DualLobe;
        throw ParseError(n, "unknown model '" + std::string(v) + "'");
    };
    auto parse_bool = [](std::string_view v, std::size_t n) {
        if (v == "true")
            return true;
        if (v == "false")
            return false;
        throw ParseError(n, "expected true or false");
    };
    auto make_params = [](LobeModel m, double s, int ar, std::string_view ai, std::string_view lam, std::size_t n) {
        if (m == LobeModel::SingleLobe)
        {
            if (ai != "-" || lam != "-")
                throw ParseError(n, "single-lobe entries must not carry alpha_i or lambda");
            return LobeParams::single(s, ar);
        }
        return LobeParams::dual(s, ar, parse_int(ai, n, "alpha_i"), parse_number(lam, n, "lambda"));
    };

    for (auto const& [n, line] : lines_of(text))
    {
        if (is_skippable(line))
            continue;
        if (!in_trace)
        {
            if (line == "[trace]")
            {
                in_trace = true;
                continue;
            }
            auto const eq = line.find(" = ");
            if (eq == std::string_view::npos)
                throw ParseError(n, "expected 'key = value'");
            std::string key(line.substr(0, eq));
            if (kv.contains(key))
                throw ParseError(n, "duplicate key '" + key + "'");
            kv.emplace(std::move(key), std::make_pair(n, line.substr(eq + 3)));
            continue;
        }
        if (!seen_trace_header)
        {
            if (line != trace_header)
                throw ParseError(n, "expected trace header");
            seen_trace_header = true;
            model = parse_model(kv.at("model").second, kv.at("model").first);
            continue;
        }
        auto const f = split(line, ',');
        if (f.size() != 7 || f[1].size() != 1 || (f[1][0] != 'A' && f[1][0] != 'B'))
            throw ParseError(n, "malformed trace row");
        TraceEntry e;
        e.round = parse_int(f[0], n, "round");
        e.stage = f[1][0];
        e.params = make_params(*model, parse_number(f[2], n, "s"), parse_int(f[3], n, "alpha_r"), f[4], f[5], n);
        e.fvu = parse_number(f[6], n, "fvu");
        r.trace.push_back(e);
    }

    static constexpr std::string_view required[] = {
        "model", "fvu", "s_initial", "best.s", "best.alpha_r", "best.alpha_i", "best.lambda", "lambda_prior",
        "plane_only", "converged", "rounds", "points", "trace_rows"};
    for (auto key : required)
        if (!kv.contains(key))
            throw InputError("report is missing '" + std::string(key) + "'");
    for (auto const& [key, entry] : kv)
        if (std::find(std::begin(required), std::end(required), key) == std::end(required))
            throw ParseError(entry.first, "unknown key '" + key + "'");
    if (!seen_trace_header)
        throw InputError("report has no trace section");

    auto get = [&](std::string_view key) { return kv.find(key)->second; };
    auto num = [&](std::string_view key) {
        auto const [n, v] = get(key);
        return parse_number(v, n, key);
    };
    auto integer = [&](std::string_view key) {
        auto const [n, v] = get(key);
        return parse_int(v, n, key);
    };
    r.model = *model;
    r.fvu = num("fvu");
    r.s_initial = num("s_initial");
    r.best = make_params(r.model, num("best.s"), integer("best.alpha_r"), get("best.alpha_i").second,
                         get("best.lambda").second, get("best.s").first);
    r.lambda_prior = num("lambda_prior");
    r.plane_only = parse_bool(get("plane_only").second, get("plane_only").first);
    r.converged = parse_bool(get("converged").second, get("converged").first);
    r.rounds = integer("rounds");
    r.points = static_cast<std::size_t>(integer("points"));
    if (static_cast<std::size_t>(integer("trace_rows")) != r.trace.size())
        throw InputError("report trace row count does not match trace_rows");
    return r;
}

inline FitReport read_report(std::string const& path) { return parse_report(read_file(path)); }

//---------------------------------------------------------------------------//
// Sweep and diagnostic tables
//---------------------------------------------------------------------------//

inline std::string format_pattern(std::vector<PatternRow> const& rows, LobeModel model,
                                  std::string_view material, std::string_view header = {})
{
    std::ostringstream os;
    write_header_comment(os, header);
    os << "theta_i_deg,direction,p_r_dbm,model,material\n";
    for (auto const& r : rows)
        os << format_number(r.theta_i_deg) << ',' << to_string(r.direction) << ',' << format_number(r.p_r_dbm)
           << ',' << to_string(model) << ',' << material << '\n';
    return os.str();
}

struct TheoryRow
{
    std::string material;
    double theta_i_deg = 0.0;
    ReflectionBundle bundle;
};

inline std::string format_theory(std::vector<TheoryRow> const& rows, std::string_view header = {})
{
    std::ostringstream os;
    write_header_comment(os, header);
    os << "material,theta_i_deg,gamma,rayleigh_r,gamma_rough,s_coeff\n";
    for (auto const& r : rows)
        os << r.material << ',' << format_number(r.theta_i_deg) << ',' << format_number(r.bundle.gamma) << ','
           << format_number(r.bundle.rayleigh_r) << ',' << format_number(r.bundle.gamma_rough) << ','
           << format_number(r.bundle.s_coeff) << '\n';
    return os.str();
}

struct AngleRow
{
    double azimuth_deg = 0.0;
    double delta_h = 0.0;
    ScatterGeometry center;  // path via the wall center
    bool specular_on_wall = false;
};

inline std::string format_angles(std::vector<AngleRow> const& rows, std::string_view header = {})
{
    std::ostringstream os;
    write_header_comment(os, header);
    os << "angle_deg,delta_h_cm,r_i_m,r_s_m,theta_i_deg,theta_s_deg,psi_r_deg,psi_i_deg,specular_on_wall\n";
    for (auto const& r : rows)
        os << format_number(r.azimuth_deg) << ',' << format_number(meters_to_file_cm(r.delta_h)) << ','
           << format_number(r.center.r_i) << ',' << format_number(r.center.r_s) << ','
           << format_number(rad_to_deg(r.center.theta_i)) << ',' << format_number(rad_to_deg(r.center.theta_s))
           << ',' << format_number(rad_to_deg(r.center.psi_r)) << ',' << format_number(rad_to_deg(r.center.psi_i))
           << ',' << (r.specular_on_wall ? 1 : 0) << '\n';
    return os.str();
}

}  // namespace mmscatter::io
