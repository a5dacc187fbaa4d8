#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "doctest.h"
#include "smc/config.hpp"
#include "smc/constants.hpp"
#include "smc/errors.hpp"

using namespace smc;

TEST_CASE("parse_quantity handles the documented unit suffixes") {
    CHECK(parse_quantity("271.5G") == doctest::Approx(0.02715).epsilon(1e-14));
    CHECK(parse_quantity("7ms") == doctest::Approx(7e-3).epsilon(1e-14));
    CHECK(parse_quantity("2.87GHz") == doctest::Approx(2.87e9).epsilon(1e-14));
    CHECK(parse_quantity("45deg") == doctest::Approx(pi / 4.0).epsilon(1e-14));
    CHECK(parse_quantity("10um") == doctest::Approx(1e-5).epsilon(1e-14));
    CHECK(parse_quantity("5%") == doctest::Approx(0.05).epsilon(1e-14));
    CHECK(parse_quantity("3mrad") == doctest::Approx(3e-3).epsilon(1e-14));
    CHECK(parse_quantity("300K") == 300.0);
    CHECK(parse_quantity("1.22us") == doctest::Approx(1.22e-6).epsilon(1e-14));
    CHECK(parse_quantity("90ns") == doctest::Approx(90e-9).epsilon(1e-14));
    CHECK(parse_quantity("0.5T") == 0.5);
    CHECK(parse_quantity("505nT") == doctest::Approx(505e-9).epsilon(1e-14));

    // bare numbers pass through, whitespace is trimmed
    CHECK(parse_quantity("1e8") == 1e8);
    CHECK(parse_quantity("-0.25") == -0.25);
    CHECK(parse_quantity("  12 us ") == doctest::Approx(1.2e-5).epsilon(1e-14));

    // "m" alone is metres; "ms" must win by longest match
    CHECK(parse_quantity("7m") == 7.0);
    CHECK(parse_quantity("2300rad") == 2300.0);
}

TEST_CASE("parse_quantity rejects malformed input") {
    CHECK_THROWS_AS(parse_quantity(""), InvalidInput);
    CHECK_THROWS_AS(parse_quantity("   "), InvalidInput);
    CHECK_THROWS_AS(parse_quantity("abcHz"), InvalidInput);
    CHECK_THROWS_AS(parse_quantity("12 parsecs"), InvalidInput);
    CHECK_THROWS_AS(parse_quantity("12qq"), InvalidInput);
    CHECK_THROWS_AS(parse_quantity("1e999"), InvalidInput);
}

namespace {

const char* sample_text = R"(# top-level scope
workers = 4

[trap]
omega = 2300      # rad/s
inertia = 1.3e-23

[torque]
field = 271.5G
n_spins = 1e8
phases = 0deg, 90deg, 180deg
)";

} // namespace

TEST_CASE("parse_text sections, comments, and typed getters") {
    RunConfig cfg = RunConfig::parse_text(sample_text, "sample");
    CHECK(cfg.origin() == "sample");

    CHECK(cfg.get_int("workers") == 4);
    CHECK(cfg.get_quantity("trap.omega") == 2300.0);
    CHECK(cfg.get_quantity("trap.inertia") == doctest::Approx(1.3e-23).epsilon(1e-14));
    CHECK(cfg.get_quantity("torque.field") == doctest::Approx(0.02715).epsilon(1e-14));
    CHECK(cfg.get_int("torque.n_spins") == 100000000);
    CHECK(cfg.get_string("torque.field") == "271.5G");

    const std::vector<double> phases = cfg.get_list("torque.phases");
    REQUIRE(phases.size() == 3);
    CHECK(phases[0] == 0.0);
    CHECK(phases[1] == doctest::Approx(pi / 2.0).epsilon(1e-14));
    CHECK(phases[2] == doctest::Approx(pi).epsilon(1e-14));

    CHECK(cfg.has("trap.omega"));
    CHECK(!cfg.has("trap.gamma_g"));
    CHECK(cfg.get_quantity_or("trap.gamma_g", 6280.0) == 6280.0);
    CHECK(cfg.get_int_or("run.seed", 1) == 1);
    CHECK(cfg.get_string_or("run.format", "csv") == "csv");

    cfg.require_consumed(); // everything above was read
}

TEST_CASE("parse_text reports errors with line numbers") {
    try {
        RunConfig::parse_text("a = 1\n[oops\nb = 2\n");
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(e.line == 2);
        CHECK(std::string(e.what()).find("unterminated") != std::string::npos);
    }

    try {
        RunConfig::parse_text("[a]\nx = 1\nx = 2\n");
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(e.line == 3);
        CHECK(e.key == "a.x");
        CHECK(std::string(e.what()).find("duplicate") != std::string::npos);
    }

    try {
        RunConfig::parse_text("[a]\nx =\n");
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(e.line == 2);
        CHECK(e.key == "x");
    }

    CHECK_THROWS_AS(RunConfig::parse_text("just words\n"), ConfigError);
    CHECK_THROWS_AS(RunConfig::parse_text("= 3\n"), ConfigError);
    CHECK_THROWS_AS(RunConfig::parse_text("[]\n"), ConfigError);
    CHECK_THROWS_AS(RunConfig::parse_file("/nonexistent/smc.cfg"), ConfigError);
}

TEST_CASE("typed getters validate their values") {
    RunConfig cfg = RunConfig::parse_text("[a]\nx = 2.5\nbad = 12qq\nflag = maybe\n");

    CHECK_THROWS_AS((void)cfg.get_int("a.x"), ConfigError);
    CHECK_THROWS_AS((void)cfg.get_quantity("a.bad"), ConfigError);
    try {
        (void)cfg.get_quantity("a.bad");
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(e.key == "a.bad");
        CHECK(e.line == 3);
    }
    CHECK_THROWS_AS((void)cfg.get_bool_or("a.flag", false), ConfigError);
    CHECK_THROWS_AS((void)cfg.get_quantity("a.missing"), ConfigError);
    CHECK_THROWS_AS((void)cfg.get_list("a.missing"), ConfigError);
}

TEST_CASE("boolean spellings") {
    RunConfig cfg = RunConfig::parse_text(
        "[f]\na = true\nb = yes\nc = 1\nd = false\ne = no\ng = 0\n");
    CHECK(cfg.get_bool_or("f.a", false));
    CHECK(cfg.get_bool_or("f.b", false));
    CHECK(cfg.get_bool_or("f.c", false));
    CHECK(!cfg.get_bool_or("f.d", true));
    CHECK(!cfg.get_bool_or("f.e", true));
    CHECK(!cfg.get_bool_or("f.g", true));
    CHECK(cfg.get_bool_or("f.absent", true));
}

TEST_CASE("require_consumed names the first untouched key") {
    RunConfig cfg = RunConfig::parse_text("[a]\nx = 1\ny = 2\n[b]\nz = 3\n");
    (void)cfg.get_quantity("a.x");
    (void)cfg.get_quantity("b.z");
    try {
        cfg.require_consumed();
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(e.key == "a.y");
        CHECK(std::string(e.what()).find("a.y") != std::string::npos);
        CHECK(std::string(e.what()).find("not used") != std::string::npos);
    }
    CHECK(cfg.has("a.y")); // has() counts as a read
    cfg.require_consumed();
}

TEST_CASE("overrides replace or create entries") {
    RunConfig cfg = RunConfig::parse_text("[run]\nseed = 1\n");
    cfg.apply_override("run.seed=9");
    CHECK(cfg.get_int("run.seed") == 9);
    cfg.apply_override("run.workers = 8");
    CHECK(cfg.get_int("run.workers") == 8);

    CHECK_THROWS_AS(cfg.apply_override("run.seed"), ConfigError);
    CHECK_THROWS_AS(cfg.apply_override("=5"), ConfigError);
    CHECK_THROWS_AS(cfg.apply_override("run.seed="), ConfigError);
}

TEST_CASE("entries come back sorted by key") {
    RunConfig cfg = RunConfig::parse_text("[zz]\nk = 1\n[aa]\nk = 2\nb = 3\n");
    const auto e = cfg.entries();
    REQUIRE(e.size() == 3);
    CHECK(e[0].first == "aa.b");
    CHECK(e[1].first == "aa.k");
    CHECK(e[2].first == "zz.k");
    CHECK(e[1].second == "2");
}

TEST_CASE("presets parse and tag themselves") {
    const std::vector<std::string> names = preset_names();
    REQUIRE(names.size() == 7);
    const std::vector<std::string> expected = {
        "fig1-rabi",  "fig2-echo",          "fig3-t1",  "fig4-pump-probe",
        "figS2-fokker-planck", "paper-s5",  "paper-s7-fit"};
    for (const auto& want : expected)
        CHECK(std::find(names.begin(), names.end(), want) != names.end());

    for (const auto& name : names) {
        RunConfig cfg = preset_config(name);
        CHECK(cfg.get_string("run.preset") == name);
        CHECK(cfg.origin() == "preset:" + name);
    }

    // a couple of documented values
    CHECK(preset_config("fig3-t1").get_quantity("torque.field") ==
          doctest::Approx(0.02715).epsilon(1e-14));
    CHECK(preset_config("figS2-fokker-planck").get_quantity("torque.t1") ==
          doctest::Approx(7e-3).epsilon(1e-14));
    CHECK(preset_config("fig4-pump-probe").get_quantity("trap.radius") ==
          doctest::Approx(1e-5).epsilon(1e-14));

    try {
        preset_config("fig9-imaginary");
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("fig1-rabi") != std::string::npos);
    }
}
