#include <gtest/gtest.h>

#include <random>
#include <string>

#include "mmscatter/io.hpp"
#include "support.hpp"

using namespace mmscatter;

namespace {

std::string arc_text(int heights)
{
    std::string t = "angle_deg,delta_h_cm,power_dbm\n";
    for (int h = 0; h < heights; ++h)
        for (int az = -90; az <= 90; az += 10)
            t += std::to_string(az) + "," + std::to_string(10 * h) + "," + std::to_string(-50 - std::abs(az) / 10) + ".25\n";
    return t;
}

template<class F>
std::size_t parse_error_line(F&& f)
{
    try
    {
        f();
    }
    catch (ParseError const& e)
    {
        return e.line();
    }
    return 0;
}

FitReport sample_report()
{
    FitReport r;
    r.model = LobeModel::DualLobe;
    r.best = LobeParams::dual(0.30000000000000004, 3, 7, 0.2);
    r.fvu = 0.1234567890123;
    r.s_initial = 0.3583375424180495;
    r.lambda_prior = 2.0 / 3.0;
    r.plane_only = true;
    r.converged = false;
    r.rounds = 10;
    r.points = 76;
    r.trace.push_back({1, 'A', LobeParams::dual(0.1 + 0.2, 1, 1, 0.0), 0.9});
    r.trace.push_back({1, 'B', LobeParams::dual(1.0 / 3.0, 3, 7, 0.2), 1e-300});
    r.trace.push_back({2, 'A', LobeParams::dual(0.30000000000000004, 3, 7, 0.2), 0.1234567890123});
    return r;
}

}  // namespace

TEST(ScanFile, ArcAndCylinderCounts)
{
    EXPECT_EQ(io::parse_scan(arc_text(1)).size(), 19u);
    EXPECT_EQ(io::parse_scan(arc_text(4)).size(), 76u);
}

TEST(ScanFile, RoundTripIsExact)
{
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> pw(-120.0, 0.0), az(-90.0, 90.0);
    std::uniform_int_distribution<int> hk(0, 300);
    Scan s;
    for (int i = 0; i < 200; ++i)
        s.points.push_back({az(rng), hk(rng) / 1000.0, pw(rng)});
    s.points.push_back({90.0, 0.3, -std::numeric_limits<double>::infinity()});
    mmscatter::testing::ScratchDir dir("scan");
    io::write_scan(s, dir.file("s.csv"), "note");
    EXPECT_EQ(io::read_scan(dir.file("s.csv")), s);
}

TEST(ScanFile, DuplicatePositionNamesLine)
{
    std::string const t = "angle_deg,delta_h_cm,power_dbm\n30,0,-50\n40,0,-51\n30,0,-52\n";
    EXPECT_EQ(parse_error_line([&] { io::parse_scan(t); }), 4u);
    try
    {
        io::parse_scan(t);
    }
    catch (ParseError const& e)
    {
        EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos) << e.what();
    }
}

TEST(ScanFile, RejectsMalformedInput)
{
    EXPECT_THROW(io::parse_scan(""), InputError);
    EXPECT_THROW(io::parse_scan("# only a comment\n"), InputError);
    EXPECT_THROW(io::parse_scan("angle_deg,delta_h_cm,power_dbm\n"), InputError);
    EXPECT_EQ(parse_error_line([] { io::parse_scan("angle,dh,p\n1,0,2\n"); }), 1u);
    EXPECT_EQ(parse_error_line([] { io::parse_scan("angle_deg,delta_h_cm,power_dbm\n1,0,-50\n2,0,-50dB\n"); }), 3u);
    EXPECT_EQ(parse_error_line([] { io::parse_scan("angle_deg,delta_h_cm,power_dbm\n1,0,-50,7\n"); }), 2u);
    EXPECT_EQ(parse_error_line([] { io::parse_scan("angle_deg,delta_h_cm,power_dbm\n1,0,-50\r\n"); }), 2u);
    EXPECT_EQ(parse_error_line([] { io::parse_scan("angle_deg,delta_h_cm,power_dbm\n95,0,-50\n"); }), 2u);
    EXPECT_EQ(parse_error_line([] { io::parse_scan("angle_deg,delta_h_cm,power_dbm\n1,0,-5,0\n"); }), 2u);
    EXPECT_EQ(parse_error_line([] { io::parse_scan("angle_deg,delta_h_cm,power_dbm\n1;0;-5\n"); }), 2u);
    EXPECT_THROW(io::read_scan("/nonexistent/scan.csv"), InputError);
}

TEST(ScanFile, AcceptsCommentsAndSimulatedColumns)
{
    Scan const s = io::parse_scan(
        "# header comment\nangle_deg,delta_h_cm,power_dbm,specular_dbm,diffuse_dbm\n# mid\n-10,30,-40,-45,-41.5\n");
    ASSERT_EQ(s.size(), 1u);
    EXPECT_EQ(s.points[0].delta_h, 0.3);
    EXPECT_EQ(s.points[0].power_dbm, -40.0);
}

TEST(ScanFile, HeightsPrintAsCentimeters)
{
    Scan s;
    s.points.push_back({0.0, 0.1 + 0.2, -50.0});
    std::string const text = io::format_scan(s);
    EXPECT_NE(text.find("0,30,-50\n"), std::string::npos) << text;
}

TEST(ReportFile, WriteThenReadIsIdentity)
{
    mmscatter::testing::ScratchDir dir("report");
    FitReport const r = sample_report();
    io::write_report(r, dir.file("r.txt"), "mmscatter test\nsecond line");
    EXPECT_EQ(io::read_report(dir.file("r.txt")), r);

    FitReport single;
    single.model = LobeModel::SingleLobe;
    single.best = LobeParams::single(0.05, 10);
    single.trace.push_back({1, 'A', single.best, 0.0});
    single.points = 2;
    EXPECT_EQ(io::parse_report(io::format_report(single)), single);
}

TEST(ReportFile, RecordsInitialAndBestSeparately)
{
    std::string const text = io::format_report(sample_report());
    EXPECT_NE(text.find("s_initial = 0.3583375424180495\n"), std::string::npos);
    EXPECT_NE(text.find("best.s = 0.30000000000000004\n"), std::string::npos);
    EXPECT_NE(text.find("trace_rows = 3\n"), std::string::npos);
}

TEST(ReportFile, RejectsTampering)
{
    std::string const good = io::format_report(sample_report());
    auto replace = [&](std::string const& from, std::string const& to) {
        std::string t = good;
        t.replace(t.find(from), from.size(), to);
        return t;
    };
    EXPECT_THROW(io::parse_report(replace("trace_rows = 3", "trace_rows = 4")), InputError);
    EXPECT_THROW(io::parse_report(replace("fvu = 0.1234567890123", "fvu = abc")), ParseError);
    EXPECT_THROW(io::parse_report(replace("rounds = 10", "round = 10")), InputError);
    EXPECT_THROW(io::parse_report(good + "garbage\n"), ParseError);
    EXPECT_THROW(io::parse_report(replace("[trace]\n", "")), InputError);
}

TEST(MaterialFile, ShippedFileMatchesEmbeddedDefaults)
{
    std::string const text = io::read_file(std::string(MMSCATTER_DATA_DIR) + "/materials.txt");
    EXPECT_EQ(text, default_materials_text);
    auto const db = io::read_materials(std::string(MMSCATTER_DATA_DIR) + "/materials.txt");
    ASSERT_EQ(db.size(), 4u);
    double const h[] = {0.170e-3, 0.216e-3, 0.445e-3, 0.715e-3};
    for (std::size_t i = 0; i < 4; ++i)
        EXPECT_EQ(db.all()[i].h_rms, h[i]);
}

TEST(MaterialFile, UnitSuffixes)
{
    auto const db = io::parse_materials("name=a; eps_r=4; h_rms=0.5 mm; thickness=32 cm\n"
                                        "name=b; eps_r=4; h_rms_mm=0.5; thickness=0.32 m\n"
                                        "name=c; eps_r=4; h_rms=5e-4 m; thickness_cm=32\n");
    for (char const* n : {"a", "b", "c"})
    {
        EXPECT_EQ(db.find(n).thickness, 0.32) << n;
        EXPECT_EQ(db.find(n).h_rms, 0.5e-3) << n;
    }
}

TEST(MaterialFile, Errors)
{
    EXPECT_EQ(parse_error_line([] { io::parse_materials("# c\nname=x; eps_r=0.5; h_rms_mm=1; thickness_cm=1\n"); }), 2u);
    EXPECT_EQ(parse_error_line([] { io::parse_materials("name=x; eps_r=5; h_rms_mm=1; thickness_cm=1; color=red\n"); }), 1u);
    EXPECT_EQ(parse_error_line([] { io::parse_materials("name=x; eps_r=5; h_rms_mm=1\n"); }), 1u);
    EXPECT_EQ(parse_error_line([] { io::parse_materials("name=x; eps_r=five; h_rms_mm=1; thickness_cm=1\n"); }), 1u);
    EXPECT_EQ(parse_error_line([] { io::parse_materials("name=x; eps_r=5; h_rms=1; thickness_cm=1\n"); }), 1u);
    EXPECT_EQ(parse_error_line([] { io::parse_materials("name=x; eps_r=5; h_rms=1 in; thickness_cm=1\n"); }), 1u);
    EXPECT_EQ(parse_error_line([] { io::parse_materials("name=x; eps_r=5; eps_r=6; h_rms_mm=1; thickness_cm=1\n"); }), 1u);
    EXPECT_EQ(parse_error_line([] {
                  io::parse_materials("name=x; eps_r=5; h_rms_mm=1; thickness_cm=1\nname=x; eps_r=5; h_rms_mm=1; thickness_cm=1\n");
              }),
              2u);
}

TEST(SceneFile, RoundTripAndDefaults)
{
    io::SceneFile f;
    f.scene = Scene::measurement("rough_wall", 30.0);
    f.scan = ScanSpec::cylinder();
    io::SceneFile const back = io::parse_scene(io::format_scene(f));
    EXPECT_EQ(back.scene.tx, f.scene.tx);
    EXPECT_EQ(back.scene.wall.center, f.scene.wall.center);
    EXPECT_EQ(back.scene.wall.material, "rough_wall");
    EXPECT_EQ(back.scene.carrier_frequency, 28e9);
    ASSERT_TRUE(back.scan);
    EXPECT_EQ(back.scan->height_offsets, f.scan->height_offsets);

    f.scan.reset();
    EXPECT_FALSE(io::parse_scene(io::format_scene(f)).scan.has_value());
}

TEST(SceneFile, Errors)
{
    std::string const base = "wall.center = 0 0 1.7\nwall.normal = 0 1 0\nwall.width_m = 3\nwall.height_m = 3\n"
                             "wall.material = rough_wall\ntx = -0.75 1.3 1.7\nfrequency_ghz = 28\n";
    EXPECT_NO_THROW(io::parse_scene(base));
    EXPECT_EQ(parse_error_line([&] { io::parse_scene(base + "wall.tilt = 3\n"); }), 8u);
    EXPECT_EQ(parse_error_line([&] { io::parse_scene(base + "tx = 1 1 1\n"); }), 8u);
    EXPECT_THROW(io::parse_scene("wall.center = 0 0 1.7\n"), InputError);
    std::string bad = base;
    bad.replace(bad.find("0 1 0"), 5, "0 1");
    EXPECT_EQ(parse_error_line([&] { io::parse_scene(bad); }), 2u);
    std::string behind = base;
    behind.replace(behind.find("1.3 1.7"), 7, "-1.3 1.7");
    EXPECT_THROW(io::parse_scene(behind), InputError);
}

TEST(Numbers, ShortestRoundTrip)
{
    for (double v : {0.1, 1.0 / 3.0, -1e-300, 6.02214076e23, 28.0})
        EXPECT_EQ(io::parse_number(io::format_number(v), 1, "v"), v);
    EXPECT_EQ(io::format_number(28.0), "28");
    EXPECT_THROW(io::parse_number("1,5", 3, "v"), ParseError);
    EXPECT_THROW(io::parse_number("", 3, "v"), ParseError);
}

TEST(Digest, Sha256KnownVector)
{
    EXPECT_EQ(io::sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}
