#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include "stiffbeam/cross_section.hpp"
#include "stiffbeam/trials.hpp"

using namespace stiffbeam;

namespace {

BeamSpec probe_beam(double L = 0.042) {
    return make_beam_spec(0.115e-3, 0.1e-3, 67e9, 55e9, L);
}

const StrainCurve& shared_curve() {
    static const StrainCurve curve = [] {
        const BeamSpec beam = probe_beam();
        return build_strain_curve(beam, default_layout(beam.dy_fbg),
                                  default_kappa_grid());
    }();
    return curve;
}

std::filesystem::path tmp_file(const std::string& name) {
    return std::filesystem::temp_directory_path() / name;
}

} // namespace

TEST_CASE("hertz force basics") {
    const TissueSpec tissue{500e3, 0.49, 3.5e-3};
    CHECK(hertz_force(tissue, 0.0) == 0.0);
    // delta^{3/2} power law
    const double d = 0.4e-3;
    CHECK(hertz_force(tissue, 4.0 * d) ==
          doctest::Approx(8.0 * hertz_force(tissue, d)).epsilon(1e-13));
}

TEST_CASE("hertz force matches the frozen closed-form point") {
    // E_t such that (nu=0.5, delta=1 mm, R=3.5 mm) carries 0.1 N, computed
    // independently before the build
    const TissueSpec tissue{30066.889715147747, 0.5, 3.5e-3};
    CHECK(hertz_force(tissue, 1e-3) == doctest::Approx(0.1).epsilon(1e-10));
    // and the inverse returns the indentation
    CHECK(hertz_indentation(tissue, 0.1) == doctest::Approx(1e-3).epsilon(1e-12));
}

TEST_CASE("hertz round trip across a log grid") {
    for (double E : {1e4, 1e5, 1e6, 1e7}) {
        for (double d : {1e-5, 1e-4, 1e-3}) {
            const TissueSpec t{E, 0.45, 3.5e-3};
            const double P = hertz_force(t, d);
            CHECK(hertz_indentation(t, P) == doctest::Approx(d).epsilon(1e-12));
        }
    }
}

TEST_CASE("tissue validation") {
    CHECK_THROWS_AS(hertz_force({-1.0, 0.4, 3.5e-3}, 1e-4), InvalidInput);
    CHECK_THROWS_AS(hertz_force({1e5, 0.6, 3.5e-3}, 1e-4), InvalidInput);
    CHECK_THROWS_AS(hertz_force({1e5, 0.4, 0.0}, 1e-4), InvalidInput);
    CHECK_THROWS_AS(hertz_force({1e5, 0.4, 3.5e-3}, -1e-6), InvalidInput);
}

TEST_CASE("rigid surface buckles almost immediately after contact") {
    const BeamSpec beam = probe_beam();
    TrialProtocol protocol;
    const TrialTrace trace = simulate_trial(
        beam, {1e9, 0.49, 3.5e-3}, default_layout(beam.dy_fbg), protocol,
        shared_curve());
    const long ci = std::stol(trace.meta.at("contact_index_true"));
    const long bi = std::stol(trace.meta.at("buckling_index_true"));
    CHECK(bi - ci <= 1);
}

TEST_CASE("ground-truth indentation follows the closed-form phase boundary") {
    const BeamSpec beam = probe_beam();
    const StrainCurve& curve = shared_curve();
    TrialProtocol protocol;
    double prev = 1.0;
    for (double E : {100e3, 200e3, 400e3, 800e3, 1600e3}) {
        const TissueSpec tissue{E, 0.49, 3.5e-3};
        const TrialTrace trace = simulate_trial(
            beam, tissue, default_layout(beam.dy_fbg), protocol, curve);
        const double di = std::stod(trace.meta.at("delta_i_true_m"));
        CHECK(di == doctest::Approx(hertz_indentation(tissue, curve.P_cr))
                        .epsilon(1e-12));
        CHECK(di < prev);  // strictly decreasing in E_t
        prev = di;
    }
}

TEST_CASE("phase structure of a noiseless trial") {
    const BeamSpec beam = probe_beam();
    const GratingLayout layout = default_layout(beam.dy_fbg);
    TrialProtocol protocol;
    const TrialTrace trace =
        simulate_trial(beam, {300e3, 0.49, 3.5e-3}, layout, protocol,
                       shared_curve());

    const long ci = std::stol(trace.meta.at("contact_index_true"));
    const long bi = std::stol(trace.meta.at("buckling_index_true"));
    CHECK(ci <= bi);
    CHECK(bi < static_cast<long>(trace.samples.size()) - 1);

    for (const auto& s : trace.samples) {
        REQUIRE(s.force.has_value());
        if (s.index < ci) {
            CHECK(*s.force == 0.0);
            CHECK(s.dlambda_pm[0] == 0.0);
        } else if (s.index < bi) {
            CHECK(*s.force > 0.0);
            CHECK(s.dlambda_pm[0] == 0.0);
        } else {
            // post-buckling: wavelength channels carry the shape
            CHECK(*s.force >= shared_curve().P_cr * 0.999);
        }
    }
    // strains move right after onset
    double norm = 0.0;
    for (double d : trace.samples[bi].dlambda_pm) norm += d * d;
    CHECK(std::sqrt(norm) > 1.0);  // pm
}

TEST_CASE("same seed reproduces the trace bit for bit") {
    const BeamSpec beam = probe_beam();
    const GratingLayout layout = default_layout(beam.dy_fbg);
    TrialProtocol protocol;
    protocol.noise_sigma_pm = 2.0;
    protocol.seed = 42;
    const TrialTrace a =
        simulate_trial(beam, {300e3, 0.49, 3.5e-3}, layout, protocol,
                       shared_curve());
    const TrialTrace b =
        simulate_trial(beam, {300e3, 0.49, 3.5e-3}, layout, protocol,
                       shared_curve());
    REQUIRE(a.samples.size() == b.samples.size());
    for (std::size_t i = 0; i < a.samples.size(); ++i) {
        CHECK(a.samples[i].encoder == b.samples[i].encoder);
        for (int j = 0; j < 3; ++j)
            CHECK(a.samples[i].dlambda_pm[j] == b.samples[i].dlambda_pm[j]);
    }

    protocol.seed = 43;
    const TrialTrace c =
        simulate_trial(beam, {300e3, 0.49, 3.5e-3}, layout, protocol,
                       shared_curve());
    bool any_diff = false;
    for (std::size_t i = 0; i < a.samples.size(); ++i)
        if (a.samples[i].dlambda_pm[0] != c.samples[i].dlambda_pm[0])
            any_diff = true;
    CHECK(any_diff);
}

TEST_CASE("too little travel names the phase reached") {
    const BeamSpec beam = probe_beam();
    const GratingLayout layout = default_layout(beam.dy_fbg);
    TrialProtocol protocol;
    protocol.travel = 1e-3;  // ends before contact
    CHECK_THROWS_WITH_AS(
        simulate_trial(beam, {100e3, 0.49, 3.5e-3}, layout, protocol,
                       shared_curve()),
        doctest::Contains("before tissue contact"), IncompleteTrial);
    protocol.travel = 3e-3;  // ends while sinking
    CHECK_THROWS_WITH_AS(
        simulate_trial(beam, {100e3, 0.49, 3.5e-3}, layout, protocol,
                       shared_curve()),
        doctest::Contains("before buckling onset"), IncompleteTrial);
}

TEST_CASE("trace CSV writes, parses back, and rewrites identically") {
    const BeamSpec beam = probe_beam();
    TrialProtocol protocol;
    protocol.noise_sigma_pm = 2.0;
    const TrialTrace trace = simulate_trial(
        beam, {500e3, 0.49, 3.5e-3}, default_layout(beam.dy_fbg), protocol,
        shared_curve());

    const auto p1 = tmp_file("stiffbeam_trace_a.csv");
    const auto p2 = tmp_file("stiffbeam_trace_b.csv");
    write_trace_csv(trace, p1.string());
    const TrialTrace parsed = read_trace_csv(p1.string());
    REQUIRE(parsed.samples.size() == trace.samples.size());
    write_trace_csv(parsed, p2.string());

    std::ifstream f1(p1), f2(p2);
    const std::string s1((std::istreambuf_iterator<char>(f1)), {});
    const std::string s2((std::istreambuf_iterator<char>(f2)), {});
    CHECK(s1 == s2);
    std::filesystem::remove(p1);
    std::filesystem::remove(p2);
}

TEST_CASE("trace CSV parse errors carry line numbers") {
    const auto p = tmp_file("stiffbeam_bad_trace.csv");
    {
        std::ofstream out(p);
    }
    CHECK_THROWS_WITH_AS(read_trace_csv(p.string()),
                         doctest::Contains("line 1"), ParseError);
    {
        std::ofstream out(p);
        out << kTraceHeader << "\n";
        out << "0,0,0,0,0,\n";
        out << "1,oops,0,0,0,\n";
    }
    CHECK_THROWS_WITH_AS(read_trace_csv(p.string()),
                         doctest::Contains("line 3"), ParseError);
    {
        std::ofstream out(p);
        out << kTraceHeader << "\n";
        out << "0,2e-3,0,0,0,\n";
        out << "1,1e-3,0,0,0,\n";  // encoder decreases
    }
    CHECK_THROWS_AS(read_trace_csv(p.string()), ParseError);
    std::filesystem::remove(p);
}

TEST_CASE("meta sidecar round trip") {
    const BeamSpec beam = probe_beam();
    TrialProtocol protocol;
    const TrialTrace trace = simulate_trial(
        beam, {300e3, 0.49, 3.5e-3}, default_layout(beam.dy_fbg), protocol,
        shared_curve());
    const auto p = tmp_file("stiffbeam_trace.meta");
    write_trace_meta(trace, p.string());
    const auto meta = read_meta(p.string());
    CHECK(meta == trace.meta);
    std::filesystem::remove(p);
}
