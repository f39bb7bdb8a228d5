#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <charconv>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "qkd/presets.hpp"
#include "qkd/profile.hpp"

using namespace qkd;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::filesystem::path temp_dir(const std::string& leaf) {
    const auto dir = std::filesystem::temp_directory_path() / ("qkdsim_test_" + leaf);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

std::vector<std::vector<double>> parse_csv_rows(const std::string& text) {
    std::vector<std::vector<double>> rows;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::vector<double> row;
        std::istringstream fields(line);
        std::string field;
        while (std::getline(fields, field, ',')) row.push_back(std::stod(field));
        rows.push_back(std::move(row));
    }
    return rows;
}

int run_cli(const std::string& args) {
    const char* bin = std::getenv("QKDSIM_BIN");
    REQUIRE(bin != nullptr);
    const int status = std::system((std::string(bin) + " " + args).c_str());
    REQUIRE(status >= 0);
    return WEXITSTATUS(status);
}

}  // namespace

TEST_CASE("format_double is shortest round-trip") {
    for (double v : {0.1, 1.0 / 3.0, 12.25, 1e-9, 2.0 / 3.0, 176.5, 0.0}) {
        const std::string s = format_double(v);
        double back = 0.0;
        std::from_chars(s.data(), s.data() + s.size(), back);
        CHECK(back == v);
    }
    CHECK(format_double(0.1) == "0.1");
    CHECK(format_double(12.0) == "12");
}

TEST_CASE("profile echo/set round trip") {
    RunProfile p;
    p.params.mu_a = 0.25;
    p.params.frame.mismatch_deg = 7.5;
    p.sweep_axis = SweepAxis::Mu;
    p.sweep_start = 0.1;
    p.sweep_stop = 0.5;
    p.sweep_step = 0.1;
    RunProfile q;
    for (const auto& [key, value] : p.echo()) q.set_key(key, value);
    CHECK(q.params.mu_a == p.params.mu_a);
    CHECK(q.params.frame.mismatch_deg == 7.5);
    CHECK(q.sweep_axis == SweepAxis::Mu);
    CHECK(q.echo() == p.echo());
}

TEST_CASE("profile parsing: sections, comments, errors") {
    const auto dir = temp_dir("profile");
    const auto path = (dir / "p.profile").string();
    {
        std::ofstream out(path);
        out << "# a comment\n[channel]\ndistance_km = 42.5\n; another comment\n"
            << "[source]\nmu = 0.2\nseed = 777\n";
    }
    const RunProfile p = load_profile_file(path);
    CHECK(p.params.channel.distance_km == 42.5);
    CHECK(p.params.mu_a == 0.2);
    CHECK(p.params.mu_b == 0.2);
    CHECK(p.seed == 777);

    RunProfile q;
    CHECK_THROWS_AS(q.set_key("no_such_key", "1"), std::invalid_argument);
    CHECK_THROWS_AS(q.set_key("mu_a", "abc"), std::invalid_argument);
    CHECK_THROWS_AS(load_profile_file((dir / "missing.profile").string()),
                    std::runtime_error);
}

TEST_CASE("override precedence: --set wins over the file") {
    RunProfile p;
    p.params.p_dark = 5e-7;
    const std::vector<std::string> sets = {"p_dark=1e-8", "pol_mismatch_deg=3"};
    apply_overrides(p, sets);
    CHECK(p.params.p_dark == 1e-8);
    CHECK(p.params.frame.mismatch_deg == 3.0);
    CHECK_THROWS_AS(apply_overrides(p, std::vector<std::string>{"oops"}),
                    std::invalid_argument);
}

TEST_CASE("table3 preset maps channel asymmetry to pulse-width mismatch") {
    const auto dir = temp_dir("table3");
    std::ostringstream log;
    const PresetOutcome outcome = run_preset("table3", RunProfile{}, dir.string(), 1, log);
    CHECK(outcome.exit_code == 0);
    const auto rows = parse_csv_rows(slurp(dir.string() + "/table3.csv"));
    REQUIRE(rows.size() == 4);
    const double expect_v[4] = {0.5, 0.45, 0.4, 0.37};
    const double expect_fwhm[4] = {0.0, 12.0, 24.0, 30.0};
    const double expect_dl[4] = {0.0, 70.6, 141.2, 176.5};
    for (int i = 0; i < 4; ++i) {
        CHECK(rows[i][0] == expect_v[i]);
        CHECK(std::abs(rows[i][2] - expect_fwhm[i]) <= 0.1);
        CHECK(rows[i][3] == expect_dl[i]);
    }
}

TEST_CASE("fig6 preset echoes the profile and records phi*") {
    const auto dir = temp_dir("fig6");
    std::ostringstream log;
    run_preset("fig6", RunProfile{}, dir.string(), 0, log);
    const std::string text = slurp(dir.string() + "/fig6.csv");
    for (const auto& [key, value] : RunProfile{}.echo()) {
        const std::string line = "# " + key + " = " + value + "\n";
        INFO("missing echo line: ", line);
        CHECK(text.find(line) != std::string::npos);
    }
    const auto star = text.find("# phi_star_deg = ");
    REQUIRE(star != std::string::npos);
    const double phi_star = std::stod(text.substr(star + 17));
    CHECK(phi_star > 0.0);
    CHECK(phi_star < 90.0);

    // The phi = 0 row of the sweep equals the mismatch-free computation.
    const auto rows = parse_csv_rows(text);
    ProtocolParams frameless = RunProfile{}.params;
    frameless.frame = PolarizationFrame{};
    const KeyRateReport direct = secure_key_rate_wcs(frameless);
    CHECK(rows[0][0] == 0.0);
    CHECK(rows[0][6] == doctest::Approx(direct.r_sec_raw).epsilon(1e-12));
}

TEST_CASE("fig8 preset starts at most at 1/2 and declines") {
    const auto dir = temp_dir("fig8");
    std::ostringstream log;
    run_preset("fig8", RunProfile{}, dir.string(), 0, log);
    const std::string text = slurp(dir.string() + "/fig8.csv");
    const auto rows = parse_csv_rows(text);
    REQUIRE(rows.size() == 101);
    // All three threshold crossings are recorded at this base width.
    for (const char* mu : {"0.01", "0.1", "0.5"}) {
        const std::string prefix = std::string("# v_th_crossing_ps mu=") + mu + " = ";
        const auto pos = text.find(prefix);
        REQUIRE(pos != std::string::npos);
        CHECK(text.compare(pos + prefix.size(), 4, "none") != 0);
    }
    for (int col = 1; col <= 3; ++col) {
        CHECK(rows[0][col] <= 0.5 + 1e-9);
        for (size_t i = 1; i < rows.size(); ++i) CHECK(rows[i][col] <= rows[i - 1][col]);
    }
    // mu = 0.01 curve starts near the low-intensity ceiling.
    CHECK(rows[0][1] == doctest::Approx(0.49750210411455320).epsilon(1e-9));
}

TEST_CASE("fig3 preset: improved sifting dominates down the distance sweep") {
    const auto dir = temp_dir("fig3");
    std::ostringstream log;
    run_preset("fig3", RunProfile{}, dir.string(), 0, log);
    const auto rows = parse_csv_rows(slurp(dir.string() + "/fig3.csv"));
    REQUIRE(rows.size() == 65);  // 0..320 km step 5
    for (const auto& row : rows) {
        REQUIRE(row.size() == 10);
        const double r_improved_raw = row[6], r_original_raw = row[8];
        if (r_improved_raw > 0.0 && r_original_raw > 0.0)
            CHECK(r_improved_raw > r_original_raw);
    }
    // Rate columns are clamped copies of the raw ones.
    CHECK(rows[0][7] == rows[0][6]);
    CHECK(rows.back()[9] == 0.0);
}

TEST_CASE("preset output is byte-identical across reruns and job counts") {
    const auto dir1 = temp_dir("rerun1");
    const auto dir2 = temp_dir("rerun2");
    std::ostringstream log;
    run_preset("fig6", RunProfile{}, dir1.string(), 1, log);
    run_preset("fig6", RunProfile{}, dir2.string(), 2, log);
    CHECK(slurp(dir1.string() + "/fig6.csv") == slurp(dir2.string() + "/fig6.csv"));
}

TEST_CASE("custom sweep: row count and monotone rate in mismatch") {
    RunProfile p;
    p.sweep_axis = SweepAxis::Distance;
    p.sweep_start = 0.0;
    p.sweep_stop = 300.0;
    p.sweep_step = 10.0;
    const auto dir = temp_dir("custom");
    std::ostringstream log;
    run_custom(p, dir.string(), 0, log);
    auto rows = parse_csv_rows(slurp(dir.string() + "/custom.csv"));
    CHECK(rows.size() == 31);

    RunProfile pol;
    pol.sweep_axis = SweepAxis::PolMismatchDeg;
    pol.sweep_start = 0.0;
    pol.sweep_stop = 20.0;
    pol.sweep_step = 1.0;
    const auto dir2 = temp_dir("custom_pol");
    run_custom(pol, dir2.string(), 0, log);
    rows = parse_csv_rows(slurp(dir2.string() + "/custom.csv"));
    REQUIRE(rows.size() == 21);
    for (size_t i = 1; i < rows.size(); ++i) CHECK(rows[i][6] <= rows[i - 1][6] + 1e-15);

    RunProfile none;
    CHECK_THROWS_AS(run_custom(none, dir.string(), 0, log), std::invalid_argument);
}

TEST_CASE("custom sweep over detuned pulse widths") {
    RunProfile p;
    p.sweep_axis = SweepAxis::DeltaLKm;
    p.sweep_start = 0.0;
    p.sweep_stop = 176.5;
    p.sweep_step = 176.5;
    p.detuning_sign = DetuningSign::Physical;
    p.delta_omega = 0.02;
    const auto dir = temp_dir("custom_dl");
    std::ostringstream log;
    run_custom(p, dir.string(), 0, log);
    const auto rows = parse_csv_rows(slurp(dir.string() + "/custom.csv"));
    REQUIRE(rows.size() == 2);
    // Detuning under the physical sign keeps the overlap below the
    // equal-frequency baseline.
    RunProfile base = p;
    base.delta_omega = 0.0;
    const auto dir2 = temp_dir("custom_dl0");
    run_custom(base, dir2.string(), 0, log);
    const auto rows0 = parse_csv_rows(slurp(dir2.string() + "/custom.csv"));
    for (size_t i = 0; i < rows.size(); ++i) CHECK(rows[i][6] < rows0[i][6]);
}

TEST_CASE("cli end to end") {
    const auto dir = temp_dir("cli");
    CHECK(run_cli("table3 --out " + dir.string()) == 0);
    CHECK(std::filesystem::exists(dir / "table3.csv"));

    CHECK(run_cli("custom --set sweep_axis=mu --set sweep_start=0.05 "
                  "--set sweep_stop=0.2 --set sweep_step=0.05 --out " +
                  dir.string()) == 0);
    CHECK(parse_csv_rows(slurp((dir / "custom.csv").string())).size() == 4);

    CHECK(run_cli("nonsense 2>/dev/null") == 64);
    CHECK(run_cli("fig6 --bogus-flag 2>/dev/null") == 64);
    CHECK(run_cli("custom --out " + dir.string() + " 2>/dev/null") == 64);
    CHECK(run_cli("table3 --set no_such_key=1 --out " + dir.string() + " 2>/dev/null") ==
          64);
}

TEST_CASE("cli profile file plus environment default") {
    const auto dir = temp_dir("cli_profile");
    const auto profile_path = (dir / "alt.profile").string();
    {
        std::ofstream out(profile_path);
        out << "mu = 0.42\nprofile_name = alt\n";
    }
    CHECK(run_cli("fig8 --profile " + profile_path + " --out " + dir.string()) == 0);
    const std::string text = slurp((dir / "fig8.csv").string());
    CHECK(text.find("# profile_name = alt\n") != std::string::npos);
    CHECK(text.find("# mu_a = 0.42\n") != std::string::npos);

    // Environment fallback: picked up when --profile is absent.
    const char* bin = std::getenv("QKDSIM_BIN");
    REQUIRE(bin != nullptr);
    const auto env_dir = temp_dir("cli_env");
    const int status = std::system(("QKDSIM_DEFAULT_PROFILE=" + profile_path + " " +
                                    std::string(bin) + " table3 --out " + env_dir.string())
                                       .c_str());
    CHECK(WEXITSTATUS(status) == 0);
    CHECK(slurp((env_dir / "table3.csv").string()).find("# profile_name = alt\n") !=
          std::string::npos);
}

TEST_CASE("cli mc-validate smoke run") {
    const auto dir = temp_dir("cli_mcv");
    CHECK(run_cli("mc-validate --set rounds=20000 --seed 5 --jobs 2 --out " +
                  dir.string()) == 0);
    const std::string text = slurp((dir / "mc_validation.txt").string());
    CHECK(text.find("RESULT PASS") != std::string::npos);
    CHECK(text.find("gain") != std::string::npos);
    CHECK(text.find("yield_improved") != std::string::npos);
}

TEST_CASE("sweep grid endpoint handling") {
    RunProfile p;
    p.sweep_start = 0.0;
    p.sweep_stop = 1.0;
    p.sweep_step = 0.25;
    CHECK(p.sweep_grid().size() == 5);
    p.sweep_stop = 0.9999;
    CHECK(p.sweep_grid().size() == 4);
    p.sweep_step = -1.0;
    CHECK_THROWS_AS(p.sweep_grid(), std::invalid_argument);
}
