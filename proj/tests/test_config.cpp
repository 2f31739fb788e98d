#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <string>

#include "stiffbeam/config.hpp"

using namespace stiffbeam;

namespace {

std::filesystem::path write_cfg(const std::string& name,
                                const std::string& body) {
    const auto p = std::filesystem::temp_directory_path() / name;
    std::ofstream out(p);
    out << body;
    return p;
}

const std::string kMinimalCfg =
    "beam.r_fbg_m = 0.115e-3\n"
    "beam.r_wire_m = 0.1e-3\n"
    "beam.E_fbg_Pa = 67e9\n"
    "beam.E_wire_Pa = 55e9\n"
    "beam.lengths_mm = 42\n";

} // namespace

TEST_CASE("canonical config loads with expected values") {
    const RunConfig rc = load_run_config(STIFFBEAM_DEFAULT_CONFIG);

    CHECK(rc.section.r_fbg == doctest::Approx(0.115e-3));
    CHECK(rc.section.n_wires == 4);
    REQUIRE(rc.lengths.size() == 5);
    CHECK(rc.lengths.front() == doctest::Approx(0.042));
    CHECK(rc.lengths.back() == doctest::Approx(0.050));
    CHECK(rc.k_eps == doctest::Approx(0.424));
    CHECK(rc.solver.samples == 8192);
    CHECK(rc.kappa_count == 64);

    REQUIRE(rc.tissues.size() == 4);
    CHECK(rc.tissues[0].name == "soft");
    CHECK(rc.tissues[0].tissue.E_t == doctest::Approx(100e3));
    CHECK(rc.tissues[3].name == "hard");
    CHECK(rc.tissues[3].tissue.nu == doctest::Approx(0.49));
    CHECK(rc.tissues[1].tissue.R_tip == doctest::Approx(3.5e-3));

    CHECK(rc.protocol.approach == doctest::Approx(2.003e-3));
    CHECK(rc.estimator_nu == doctest::Approx(0.49));
    CHECK(rc.threshold_auto);
    // auto threshold: noise floor at sigma = 0, 5-sigma rule otherwise
    CHECK(rc.strain_threshold_for_sigma(0.0) == doctest::Approx(1e-7));
    CHECK(rc.strain_threshold_for_sigma(2.0) ==
          doctest::Approx(5.0 * 2.0 / 0.424 * 1e-6));

    const BeamSpec beam = rc.beam_for_length(rc.lengths[0]);
    CHECK(beam.length == doctest::Approx(0.042));
    CHECK_NOTHROW(rc.layout_for_beam(beam));
    CHECK(rc.kappa_grid().size() == 64);
}

TEST_CASE("defaults fill every optional key") {
    const auto p = write_cfg("stiffbeam_minimal.cfg", kMinimalCfg);
    const RunConfig rc = load_run_config(p.string());
    CHECK(rc.layout_pitch == doctest::Approx(8e-3));
    CHECK(rc.solver.step == doctest::Approx(1e-3));
    CHECK(rc.protocol.step == doctest::Approx(10e-6));
    CHECK(rc.tissues.empty());
    CHECK(rc.estimator_nu == doctest::Approx(0.5));
    std::filesystem::remove(p);
}

TEST_CASE("unknown keys are rejected by name") {
    const auto p = write_cfg("stiffbeam_unknown.cfg",
                             kMinimalCfg + "beam.radius_m = 1e-3\n");
    CHECK_THROWS_WITH_AS(load_run_config(p.string()),
                         doctest::Contains("beam.radius_m"), InvalidInput);
    std::filesystem::remove(p);
}

TEST_CASE("missing required keys are reported by name") {
    const auto p = write_cfg("stiffbeam_missing.cfg",
                             "beam.r_fbg_m = 0.115e-3\n");
    CHECK_THROWS_WITH_AS(load_run_config(p.string()),
                         doctest::Contains("beam.r_wire_m"), InvalidInput);
    std::filesystem::remove(p);
}

TEST_CASE("malformed numbers are reported with the key") {
    const auto p = write_cfg(
        "stiffbeam_badnum.cfg",
        "beam.r_fbg_m = onetenth\n"
        "beam.r_wire_m = 0.1e-3\n"
        "beam.E_fbg_Pa = 67e9\n"
        "beam.E_wire_Pa = 55e9\n"
        "beam.lengths_mm = 42\n");
    CHECK_THROWS_WITH_AS(load_run_config(p.string()),
                         doctest::Contains("beam.r_fbg_m"), InvalidInput);
    std::filesystem::remove(p);
}

TEST_CASE("lines without an equals sign fail with a line number") {
    const auto p = write_cfg("stiffbeam_noeq.cfg",
                             "# header\nthis is not a key value pair\n");
    CHECK_THROWS_WITH_AS(load_run_config(p.string()),
                         doctest::Contains("line 2"), ParseError);
    std::filesystem::remove(p);
}

TEST_CASE("tissue list entries must be name:E:nu with valid numbers") {
    const auto p1 = write_cfg("stiffbeam_tissue1.cfg",
                              kMinimalCfg + "tissues = soft:100e3\n");
    CHECK_THROWS_AS(load_run_config(p1.string()), InvalidInput);
    std::filesystem::remove(p1);

    const auto p2 = write_cfg("stiffbeam_tissue2.cfg",
                              kMinimalCfg + "tissues = soft:abc:0.49\n");
    CHECK_THROWS_WITH_AS(load_run_config(p2.string()),
                         doctest::Contains("tissues"), InvalidInput);
    std::filesystem::remove(p2);

    // physically invalid Poisson ratio is rejected at load time
    const auto p3 = write_cfg("stiffbeam_tissue3.cfg",
                              kMinimalCfg + "tissues = soft:100e3:0.7\n");
    CHECK_THROWS_AS(load_run_config(p3.string()), InvalidInput);
    std::filesystem::remove(p3);
}

TEST_CASE("explicit strain threshold disables the auto rule") {
    const auto p = write_cfg(
        "stiffbeam_thr.cfg",
        kMinimalCfg + "estimator.strain_norm_threshold = 3e-6\n");
    const RunConfig rc = load_run_config(p.string());
    CHECK_FALSE(rc.threshold_auto);
    CHECK(rc.strain_threshold_for_sigma(2.0) == doctest::Approx(3e-6));
    std::filesystem::remove(p);

    const auto pbad = write_cfg(
        "stiffbeam_thr_bad.cfg",
        kMinimalCfg + "estimator.strain_norm_threshold = sometimes\n");
    CHECK_THROWS_AS(load_run_config(pbad.string()), InvalidInput);
    std::filesystem::remove(pbad);
}

TEST_CASE("missing config file raises a parse error") {
    CHECK_THROWS_AS(load_run_config("/nonexistent/stiffbeam.cfg"), ParseError);
}
