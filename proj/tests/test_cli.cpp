#include <cmath>
#include <filesystem>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "doctest.h"
#include "mwi/config.hpp"
#include "mwi/constants.hpp"
#include "mwi/csvio.hpp"
#include "mwi/dephasing.hpp"
#include "mwi/parallel.hpp"
#include "mwi/presets.hpp"
#include "mwi/scenario.hpp"

using namespace mwi;

namespace {

template <typename F>
ConfigError capture_error(F&& f) {
    try {
        f();
    } catch (const ConfigError& e) {
        return e;
    }
    FAIL("expected a ConfigError");
    return ConfigError(ConfigError::Code::parse, 0, 0, "unreachable");
}

std::string tmp_path(const char* name) {
    return (std::filesystem::temp_directory_path() / name).string();
}

// undo the comment prefixes of the embedded config header
std::string strip_csv_header(const std::string& csv) {
    std::istringstream in(csv);
    std::string line, out;
    while (std::getline(in, line)) {
        if (line.rfind("##", 0) == 0) continue;
        if (line == "#") {
            out += '\n';
            continue;
        }
        if (line.rfind("# ", 0) == 0) {
            out += line.substr(2);
            out += '\n';
            continue;
        }
        break;
    }
    return out;
}

// value of the first CSV row starting with the given prefix
double csv_value(const std::string& csv, const std::string& prefix) {
    std::istringstream in(csv);
    std::string line;
    while (std::getline(in, line)) {
        if (line.rfind(prefix, 0) != 0) continue;
        std::string rest = line.substr(prefix.size());
        return std::stod(rest.substr(0, rest.find(',')));
    }
    FAIL("row not found: " << prefix);
    return 0.0;
}

// numeric data rows (comment lines and the column header skipped)
std::vector<std::vector<double>> csv_rows(const std::string& csv) {
    std::vector<std::vector<double>> rows;
    std::istringstream in(csv);
    std::string line;
    bool header_seen = false;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        if (!header_seen) {
            header_seen = true;  // column names
            continue;
        }
        std::vector<double> row;
        std::istringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) row.push_back(std::stod(cell));
        rows.push_back(std::move(row));
    }
    return rows;
}

constexpr const char* minimal_farfield = R"([run]
kind = farfield

[particle]
mass_amu = 720

[beam]
mean_v_mps = 144

[g1]
period_nm = 100
open_fraction = 0.5
)";

} // namespace

TEST_SUITE("cli") {

TEST_CASE("minimal config fills the defaults") {
    ParsedConfig pc = parse_config_text(minimal_farfield);
    const Scenario& s = pc.scenario;
    CHECK(pc.warnings.empty());
    CHECK(s.kind == ScenarioKind::farfield);
    CHECK(s.seed == 1);
    CHECK(s.out == "out.csv");
    CHECK(s.cutoff_phase == 20.0);
    CHECK(s.n_slits == 100);
    CHECK(s.n_angles == 2048);
    CHECK(s.mode == TalbotMode::quantum);
    CHECK(s.particle.mass == doctest::Approx(720.0 * phys.amu).epsilon(1e-12));
    CHECK(s.beam.mean_v == 144.0);
    CHECK(s.beam.monochromatic());
    CHECK(s.g1.period_d == doctest::Approx(100e-9).epsilon(1e-12));
    // an omitted third grating mirrors the first
    CHECK(s.g3.period_d == s.g1.period_d);
    CHECK(s.g3.open_fraction_f == s.g1.open_fraction_f);
}

TEST_CASE("error codes carry locations") {
    SUBCASE("unknown key") {
        ConfigError e = capture_error([] {
            (void)parse_config_text("[run]\nkind = farfield\n[particle]\nfoo = 1\n");
        });
        CHECK(e.code == ConfigError::Code::unknown_key);
        CHECK(e.line == 4);
        CHECK(std::string(e.what()).find("foo") != std::string::npos);
    }

    SUBCASE("wrong unit suffix names the accepted keys") {
        ConfigError e = capture_error([] {
            (void)parse_config_text(
                "[run]\nkind = farfield\n[g1]\nperiod_um = 0.1\n");
        });
        CHECK(e.code == ConfigError::Code::unit);
        CHECK(e.line == 4);
        CHECK(std::string(e.what()).find("period_nm") != std::string::npos);
    }

    SUBCASE("value that is not a number") {
        ConfigError e = capture_error([] {
            (void)parse_config_text("[run]\nkind = farfield\n[particle]\nmass_amu = heavy\n");
        });
        CHECK(e.code == ConfigError::Code::parse);
        CHECK(e.line == 4);
    }

    SUBCASE("non-finite number") {
        ConfigError e = capture_error([] {
            (void)parse_config_text("[run]\nkind = farfield\n[particle]\nmass_amu = nan\n");
        });
        CHECK(e.code == ConfigError::Code::numeric);
    }

    SUBCASE("duplicate key") {
        ConfigError e = capture_error([] {
            (void)parse_config_text(
                "[run]\nkind = farfield\nseed = 1\nseed = 2\n");
        });
        CHECK(e.code == ConfigError::Code::parse);
        CHECK(e.line == 4);
    }

    SUBCASE("key outside any section") {
        ConfigError e = capture_error([] { (void)parse_config_text("x = 1\n"); });
        CHECK(e.code == ConfigError::Code::parse);
        CHECK(e.line == 1);
    }

    SUBCASE("unterminated section header") {
        ConfigError e = capture_error([] { (void)parse_config_text("[run\nkind = farfield\n"); });
        CHECK(e.code == ConfigError::Code::parse);
    }

    SUBCASE("missing kind") {
        ConfigError e = capture_error([] { (void)parse_config_text("[run]\nseed = 3\n"); });
        CHECK(e.code == ConfigError::Code::constraint);
        CHECK(e.line == 0);
    }

    SUBCASE("constraint violation after parsing") {
        std::string text(minimal_farfield);
        const std::string from = "open_fraction = 0.5";
        text.replace(text.find(from), from.size(), "open_fraction = 1.2");
        ConfigError e = capture_error([&] { (void)parse_config_text(text); });
        CHECK(e.code == ConfigError::Code::constraint);
        CHECK(std::string(e.what()).find("open_fraction") != std::string::npos);
    }

    SUBCASE("sweep keys must match the scenario kind") {
        const Preset* p = find_preset("c70_tl_scan");
        REQUIRE(p != nullptr);
        std::string text(p->text);
        const std::string from = "v_from_mps = 100";
        text.replace(text.find(from), from.size(), "pressure_from_Pa = 1");
        ConfigError e = capture_error([&] { (void)parse_config_text(text); });
        CHECK(e.code == ConfigError::Code::constraint);
        CHECK(std::string(e.what()).find("does not apply") != std::string::npos);
    }

    SUBCASE("missing files surface as io errors") {
        ConfigError e =
            capture_error([] { (void)parse_config_file("/nonexistent/run.ini"); });
        CHECK(e.code == ConfigError::Code::io);

        ConfigError e2 = capture_error([] {
            (void)parse_config_text("[run]\nkind = decoherence_thermal\n[particle]\nmass_amu = "
                                    "840\nsigma_table_path = /nonexistent/sigma.txt\n");
        });
        CHECK(e2.code == ConfigError::Code::io);
        CHECK(e2.line == 5);
    }

    SUBCASE("code names") {
        CHECK(std::string(ConfigError::code_name(ConfigError::Code::parse)) == "parse");
        CHECK(std::string(ConfigError::code_name(ConfigError::Code::unknown_key)) ==
              "unknown_key");
        CHECK(std::string(ConfigError::code_name(ConfigError::Code::unit)) == "unit");
        CHECK(std::string(ConfigError::code_name(ConfigError::Code::constraint)) == "constraint");
        CHECK(std::string(ConfigError::code_name(ConfigError::Code::io)) == "io");
        CHECK(std::string(ConfigError::code_name(ConfigError::Code::numeric)) == "numeric");
    }
}

TEST_CASE("irrelevant sections warn but do not fail") {
    std::string text(minimal_farfield);
    text += "\n[gas]\ngas_mass_amu = 16\ntemperature_K = 300\nC6_Jm6 = 4.65e-74\n";
    ParsedConfig pc = parse_config_text(text);
    REQUIRE(pc.warnings.size() == 1);
    CHECK(pc.warnings[0].find("[gas]") != std::string::npos);
    CHECK(pc.warnings[0].find("farfield") != std::string::npos);
}

TEST_CASE("all embedded presets parse cleanly") {
    REQUIRE(presets().size() == 9);
    for (const auto& p : presets()) {
        CAPTURE(p.name);
        ParsedConfig pc = parse_config_text(p.text);
        CHECK(pc.warnings.empty());
        CHECK(std::string(p.description).size() > 0);
    }
    CHECK(find_preset("c70_tl_fig4") != nullptr);
    CHECK(find_preset("no_such_preset") == nullptr);
}

TEST_CASE("preset parameters") {
    SUBCASE("heavy fullerene fringe scan") {
        const Scenario s = parse_config_text(find_preset("c70_tl_fig4")->text).scenario;
        CHECK(s.kind == ScenarioKind::tl_scan);
        CHECK(s.particle.mass == doctest::Approx(840.0 * phys.amu).epsilon(1e-12));
        CHECK(s.particle.C3_wall == doctest::Approx(10.0 * units::meV_nm3).epsilon(1e-12));
        CHECK(s.beam.mean_v == 115.0);
        CHECK(s.beam.monochromatic());
        CHECK(s.g1.period_d == doctest::Approx(990e-9).epsilon(1e-12));
        CHECK(s.g1.open_fraction_f == 0.48);
        CHECK(s.g1.C3 == doctest::Approx(10.0 * units::meV_nm3).epsilon(1e-12));
        CHECK_FALSE(s.g2_is_optical);
        CHECK(s.g2_material.period_d == doctest::Approx(990e-9).epsilon(1e-12));
        CHECK(s.geometry.L12 == 0.22);
        CHECK(s.geometry.L23 == 0.22);
        CHECK(s.mode == TalbotMode::quantum);
    }

    SUBCASE("velocity sweep uses a realistic thermal spread") {
        const Scenario s = parse_config_text(find_preset("c70_tl_scan")->text).scenario;
        CHECK(s.kind == ScenarioKind::visibility_velocity);
        CHECK(s.beam.sigma_v == doctest::Approx(0.16 * 150.0).epsilon(1e-12));
        CHECK(s.beam.sigma_v / s.beam.mean_v > 0.08);
        CHECK(s.beam.sigma_v / s.beam.mean_v < 0.35);
        CHECK(s.sweep.from == 100.0);
        CHECK(s.sweep.to == 220.0);
        CHECK(s.sweep.n == 25);
        CHECK_FALSE(s.sweep.log_spacing);
    }

    SUBCASE("methane pressure sweep") {
        const Scenario s = parse_config_text(find_preset("methane_pressure")->text).scenario;
        CHECK(s.gas.gas_mass == doctest::Approx(16.0 * phys.amu).epsilon(1e-12));
        CHECK(s.gas.temperature == 300.0);
        CHECK(s.gas.C6 == 4.65e-74);
        CHECK(s.sweep.log_spacing);
        CHECK(s.sweep.from == doctest::Approx(1e-8 * units::mbar).epsilon(1e-12));
        CHECK(s.sweep.to == doctest::Approx(1e-5 * units::mbar).epsilon(1e-12));
    }

    SUBCASE("optical grating power sweep") {
        const Scenario s = parse_config_text(find_preset("c70_kdtl_power")->text).scenario;
        CHECK(s.g2_is_optical);
        CHECK(s.g2_optical.laser_wavelength == doctest::Approx(532e-9).epsilon(1e-12));
        CHECK(s.g2_optical.waist_z == doctest::Approx(100e-6).epsilon(1e-12));
        CHECK(s.particle.alpha_optical.real() ==
              doctest::Approx(alpha_si_from_volume(120.0)).epsilon(1e-12));
        CHECK(s.sweep.to == 3.0);
    }

    SUBCASE("deposit options inherit the run seed") {
        const Scenario s = parse_config_text(find_preset("c70_deposit")->text).scenario;
        CHECK(s.seed == 7);
        CHECK(s.deposit.seed == 7);
        CHECK(s.deposit.n_rows == 64);
        CHECK(s.beam.v_min == 80.0);
        CHECK(s.beam.v_max == 220.0);
    }
}

TEST_CASE("sweep grids") {
    SweepSpec lin;
    lin.from = 0.0;
    lin.to = 4.0;
    lin.n = 5;
    const auto lv = lin.values();
    REQUIRE(lv.size() == 5);
    for (int i = 0; i < 5; ++i) CHECK(lv[static_cast<std::size_t>(i)] == doctest::Approx(i).epsilon(1e-15));

    SweepSpec lg;
    lg.from = 1e-8;
    lg.to = 1e-5;
    lg.n = 4;
    lg.log_spacing = true;
    const auto gv = lg.values();
    REQUIRE(gv.size() == 4);
    CHECK(gv[0] == doctest::Approx(1e-8).epsilon(1e-15));
    CHECK(gv[1] == doctest::Approx(1e-7).epsilon(1e-12));
    CHECK(gv[2] == doctest::Approx(1e-6).epsilon(1e-12));
    CHECK(gv[3] == doctest::Approx(1e-5).epsilon(1e-12));

    SweepSpec one;
    one.from = 3.0;
    one.to = 9.0;
    one.n = 1;
    CHECK(one.values() == std::vector<double>{3.0});

    SweepSpec bad = lg;
    bad.from = 0.0;
    CHECK_THROWS_AS((void)bad.values(), std::domain_error);
    bad = lg;
    bad.n = 0;
    CHECK_THROWS_AS((void)bad.values(), std::domain_error);
}

TEST_CASE("canonical serialization round trip") {
    for (const char* name :
         {"c70_tl_fig4", "methane_pressure", "c70_kdtl_power", "tilt_dephasing", "c70_deposit"}) {
        CAPTURE(name);
        const Scenario s1 = parse_config_text(find_preset(name)->text).scenario;
        const std::string text1 = scenario_to_config_text(s1);
        const Scenario s2 = parse_config_text(text1).scenario;
        const std::string text2 = scenario_to_config_text(s2);
        CHECK(text1 == text2);
        CHECK(s1.particle.mass == s2.particle.mass);  // exact, not approximate
        CHECK(s1.beam.sigma_v == s2.beam.sigma_v);
        CHECK(s1.sweep.from == s2.sweep.from);
    }
}

TEST_CASE("pressure scenario run") {
    Scenario s = parse_config_text(find_preset("methane_pressure")->text).scenario;
    s.out = tmp_path("mwi_cli_pressure.csv");

    const int old_threads = thread_count();
    set_thread_count(1);
    RunResult r1 = run_scenario(s);
    const std::string csv1 = read_text_file(s.out);
    set_thread_count(4);
    (void)run_scenario(s);
    const std::string csv4 = read_text_file(s.out);
    set_thread_count(old_threads);

    REQUIRE(r1.outputs.size() == 1);
    CHECK(r1.outputs[0] == s.out);

    SUBCASE("deterministic across thread counts") { CHECK(csv1 == csv4); }

    SUBCASE("header documents the tool and the full config") {
        CHECK(csv1.rfind("## mwisim 1.0.0", 0) == 0);
        CHECK(csv1.find("# [run]") != std::string::npos);
        CHECK(csv1.find("pressure_Pa,visibility_factor") != std::string::npos);
    }

    SUBCASE("stripping the comment prefixes reproduces the run") {
        const std::string recovered = strip_csv_header(csv1);
        const Scenario s2 = parse_config_text(recovered).scenario;
        CHECK(scenario_to_config_text(s2) == scenario_to_config_text(s));
    }

    SUBCASE("log of the contrast is linear in pressure") {
        const auto rows = csv_rows(csv1);
        REQUIRE(rows.size() == 13);
        const double slope0 = std::log(rows[0][1]) / rows[0][0];
        for (const auto& row : rows) {
            REQUIRE(row.size() == 2);
            CHECK(row[1] > 0.0);
            CHECK(std::log(row[1]) / row[0] == doctest::Approx(slope0).epsilon(1e-9));
        }
        // visible decay over the swept decades
        CHECK(rows.front()[1] > 0.9);
        CHECK(rows.back()[1] < 1e-20);
    }

    std::filesystem::remove(s.out);
}

TEST_CASE("thermal scenario run is monotone") {
    Scenario s = parse_config_text(find_preset("c70_thermal")->text).scenario;
    s.out = tmp_path("mwi_cli_thermal.csv");
    (void)run_scenario(s);
    const auto rows = csv_rows(read_text_file(s.out));
    REQUIRE(rows.size() == 21);
    CHECK(rows.front()[0] == 1000.0);
    CHECK(rows.back()[0] == 3000.0);
    CHECK(rows.front()[1] > 0.99);
    CHECK(rows.back()[1] < 0.01);
    for (std::size_t i = 1; i < rows.size(); ++i)
        CHECK(rows[i][1] <= rows[i - 1][1] + 1e-12);
    std::filesystem::remove(s.out);
}

TEST_CASE("dephasing budget run") {
    Scenario s = parse_config_text(find_preset("tilt_dephasing")->text).scenario;
    s.out = tmp_path("mwi_cli_dephasing.csv");
    (void)run_scenario(s);
    const std::string csv = read_text_file(s.out);

    const double vib = csv_value(csv, "vibration_factor,");
    CHECK(vib == doctest::Approx(vibration_visibility(s.vibration, s.g1.period_d)).epsilon(1e-9));

    const double acc = csv_value(csv, "acceleration_mps2,");
    CHECK(acc == doctest::Approx(phys.g_earth * std::sin(0.002)).epsilon(1e-9));

    const double acc_f = csv_value(csv, "acceleration_factor,");
    const double total = csv_value(csv, "total_factor,");
    CHECK(total == doctest::Approx(vib * acc_f).epsilon(1e-9));
    std::filesystem::remove(s.out);
}

TEST_CASE("fringe profile run") {
    Scenario s = parse_config_text(find_preset("c70_tl_fig4")->text).scenario;
    s.out = tmp_path("mwi_cli_fig4.csv");
    (void)run_scenario(s);
    const std::string csv = read_text_file(s.out);
    CHECK(csv.find("x_m,signal") != std::string::npos);
    const auto rows = csv_rows(csv);
    REQUIRE(rows.size() == 256);
    double lo = 1e300, hi = -1e300;
    for (const auto& row : rows) {
        REQUIRE(row.size() == 2);
        CHECK(row[1] >= -1e-9);
        lo = std::min(lo, row[1]);
        hi = std::max(hi, row[1]);
    }
    // a real fringe, not a flat trace
    CHECK(hi - lo > 0.1 * hi);
    // positions span one period of the third grating
    CHECK(rows.front()[0] == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(rows.back()[0] < 990e-9);
    std::filesystem::remove(s.out);
}

} // TEST_SUITE
