#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "stiffbeam/cross_section.hpp"
#include "stiffbeam/csv.hpp"
#include "stiffbeam/elastica.hpp"
#include "stiffbeam/errors.hpp"
#include "stiffbeam/fbg.hpp"

namespace stiffbeam {

struct TissueSpec {
    double E_t;            // Young's modulus, Pa
    double nu;             // Poisson's ratio
    double R_tip = 3.5e-3; // indenter sphere radius, m
};

inline void validate_tissue(const TissueSpec& t) {
    if (!(t.E_t > 0.0)) throw InvalidInput("TissueSpec: E_t must be positive");
    if (!(t.nu >= 0.0) || !(t.nu <= 0.5))
        throw InvalidInput("TissueSpec: nu must lie in [0, 0.5]");
    if (!(t.R_tip > 0.0)) throw InvalidInput("TissueSpec: R_tip must be positive");
}

/// Spherical-indenter Hertz force: P = (4/3) E_t sqrt(delta^3 R_tip) / (1 - nu^2).
inline double hertz_force(const TissueSpec& tissue, double delta) {
    validate_tissue(tissue);
    if (!(delta >= 0.0)) throw InvalidInput("hertz_force: delta must be >= 0");
    return 4.0 / 3.0 * tissue.E_t *
           std::sqrt(delta * delta * delta * tissue.R_tip) /
           (1.0 - tissue.nu * tissue.nu);
}

/// Inverse of hertz_force: indentation depth at a given load.
inline double hertz_indentation(const TissueSpec& tissue, double P) {
    validate_tissue(tissue);
    if (!(P >= 0.0)) throw InvalidInput("hertz_indentation: P must be >= 0");
    const double c = 3.0 * P * (1.0 - tissue.nu * tissue.nu) /
                     (4.0 * tissue.E_t * std::sqrt(tissue.R_tip));
    return std::cbrt(c * c);
}

struct TrialSample {
    long index;
    double encoder;                      // m, strictly nondecreasing
    std::array<double, 3> dlambda_pm;    // per-peak wavelength shifts
    std::optional<double> force;         // N
};

struct TrialTrace {
    std::vector<TrialSample> samples;
    double beam_length = 0.0;                    // exposed length, m
    std::map<std::string, std::string> meta;     // sidecar key-value content
};

struct TrialProtocol {
    double step = 10e-6;           // encoder advance per sample, m
    double travel = 8e-3;          // total travel, m
    double approach = 2.003e-3;    // free advance before tissue contact, m
    double noise_sigma_pm = 0.0;   // additive Gaussian noise on each dlambda
    std::uint64_t seed = 0;
};

/// Post-buckling lookup table: end-shortening -> (P, per-peak average
/// strains), built once from a solved branch. A leading knot at the
/// bifurcation (zero end-shortening, P_cr, zero strain) anchors the
/// shallow end.
struct StrainCurve {
    struct Knot {
        double end_shortening;
        double P;
        std::array<double, 3> eps;
    };
    std::vector<Knot> knots;  // sorted by end_shortening
    double P_cr = 0.0;
};

inline StrainCurve build_strain_curve_from_branch(
    const BeamSpec& beam, const GratingLayout& layout,
    const std::vector<NormalizedSolution>& branch) {
    validate_layout(layout, beam.length);
    if (layout.peaks.size() != 3)
        throw InvalidInput("build_strain_curve: trace format carries exactly 3 peaks");
    StrainCurve curve;
    curve.P_cr = critical_load(beam);
    curve.knots.push_back({0.0, curve.P_cr, {0.0, 0.0, 0.0}});
    for (const auto& sol : denormalize_branch(branch, beam)) {
        const auto eps = peak_average_strains(sol, layout);
        curve.knots.push_back(
            {sol.end_shortening, sol.P, {eps[0], eps[1], eps[2]}});
    }
    std::sort(curve.knots.begin(), curve.knots.end(),
              [](const StrainCurve::Knot& a, const StrainCurve::Knot& b) {
                  return a.end_shortening < b.end_shortening;
              });
    if (curve.knots.size() < 3)
        throw SolverError("build_strain_curve: too few solvable kappa points");
    return curve;
}

inline StrainCurve build_strain_curve(const BeamSpec& beam,
                                      const GratingLayout& layout,
                                      const std::vector<double>& kappa_grid,
                                      const SolverConfig& cfg = {},
                                      std::vector<std::string>* warnings = nullptr) {
    return build_strain_curve_from_branch(
        beam, layout, solve_normalized_branch(kappa_grid, cfg, warnings));
}

namespace detail {

inline StrainCurve::Knot interp_knot(const StrainCurve& curve, double delta) {
    const auto& k = curve.knots;
    if (delta > k.back().end_shortening)
        throw RangeError("StrainCurve: end-shortening " + std::to_string(delta) +
                         " m beyond curve range " +
                         std::to_string(k.back().end_shortening) + " m");
    auto it = std::lower_bound(k.begin(), k.end(), delta,
                               [](const StrainCurve::Knot& a, double v) {
                                   return a.end_shortening < v;
                               });
    if (it == k.begin()) return k.front();
    const auto& hi = *it;
    const auto& lo = *(it - 1);
    const double w =
        (delta - lo.end_shortening) / (hi.end_shortening - lo.end_shortening);
    StrainCurve::Knot out;
    out.end_shortening = delta;
    out.P = lo.P + w * (hi.P - lo.P);
    for (int j = 0; j < 3; ++j)
        out.eps[j] = lo.eps[j] + w * (hi.eps[j] - lo.eps[j]);
    return out;
}

} // namespace detail

/// Synthesize one indentation trial in three phases: free advance, Hertzian
/// sink with the beam held straight, then post-buckling where further
/// encoder advance becomes beam end-shortening. Indentation freezes at the
/// onset depth delta_i = hertz_indentation(tissue, P_cr); the portion of the
/// crossing step beyond delta_i already counts as end-shortening.
inline TrialTrace simulate_trial(const BeamSpec& beam, const TissueSpec& tissue,
                                 const GratingLayout& layout,
                                 const TrialProtocol& protocol,
                                 const StrainCurve& curve) {
    validate_tissue(tissue);
    if (!(protocol.step > 0.0))
        throw InvalidInput("simulate_trial: advance step must be positive");
    if (!(protocol.travel > 0.0))
        throw InvalidInput("simulate_trial: travel must be positive");

    const double x_contact = protocol.approach;
    const double delta_i = hertz_indentation(tissue, curve.P_cr);
    const double x_buckle = x_contact + delta_i;
    const long n = static_cast<long>(std::floor(protocol.travel / protocol.step));

    if (static_cast<double>(n) * protocol.step <= x_contact)
        throw IncompleteTrial("simulate_trial: travel ends in free advance, "
                              "before tissue contact");
    if (static_cast<double>(n) * protocol.step <= x_buckle)
        throw IncompleteTrial("simulate_trial: travel ends during Hertzian "
                              "sink, before buckling onset");

    std::mt19937_64 rng(protocol.seed);
    std::normal_distribution<double> noise(0.0, 1.0);

    TrialTrace trace;
    trace.beam_length = beam.length;
    long contact_index = -1, buckling_index = -1;
    for (long i = 0; i <= n; ++i) {
        const double x = static_cast<double>(i) * protocol.step;
        TrialSample sample;
        sample.index = i;
        sample.encoder = x;
        if (x <= x_contact) {
            sample.dlambda_pm = {0.0, 0.0, 0.0};
            sample.force = 0.0;
        } else if (x <= x_buckle) {
            if (contact_index < 0) contact_index = i;
            sample.dlambda_pm = {0.0, 0.0, 0.0};
            sample.force = hertz_force(tissue, x - x_contact);
        } else {
            if (contact_index < 0) contact_index = i;
            if (buckling_index < 0) buckling_index = i;
            const auto knot = detail::interp_knot(curve, x - x_buckle);
            for (int j = 0; j < 3; ++j)
                sample.dlambda_pm[j] = wavelength_shift(knot.eps[j], 0.0, layout);
            sample.force = knot.P;
        }
        if (protocol.noise_sigma_pm > 0.0)
            for (int j = 0; j < 3; ++j)
                sample.dlambda_pm[j] += protocol.noise_sigma_pm * noise(rng);
        trace.samples.push_back(sample);
    }

    trace.meta["seed"] = std::to_string(protocol.seed);
    trace.meta["step_m"] = fmt12(protocol.step);
    trace.meta["travel_m"] = fmt12(protocol.travel);
    trace.meta["approach_m"] = fmt12(protocol.approach);
    trace.meta["noise_sigma_pm"] = fmt12(protocol.noise_sigma_pm);
    trace.meta["beam_length_m"] = fmt12(beam.length);
    trace.meta["beam_EI_Nm2"] = fmt12(beam.EI);
    trace.meta["tissue_E_Pa"] = fmt12(tissue.E_t);
    trace.meta["tissue_nu"] = fmt12(tissue.nu);
    trace.meta["tip_radius_m"] = fmt12(tissue.R_tip);
    trace.meta["P_cr_N"] = fmt12(curve.P_cr);
    trace.meta["contact_index_true"] = std::to_string(contact_index);
    trace.meta["buckling_index_true"] = std::to_string(buckling_index);
    trace.meta["delta_i_true_m"] = fmt12(delta_i);
    return trace;
}

inline const std::string kTraceHeader = "index,encoder_m,dl1_pm,dl2_pm,dl3_pm,force_N";

inline void write_trace_csv(const TrialTrace& trace, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ParseError(path + ": cannot open for writing");
    out << kTraceHeader << "\n";
    for (const auto& s : trace.samples) {
        out << s.index << ',' << fmt12(s.encoder) << ',' << fmt12(s.dlambda_pm[0])
            << ',' << fmt12(s.dlambda_pm[1]) << ',' << fmt12(s.dlambda_pm[2])
            << ',' << (s.force ? fmt12(*s.force) : std::string{}) << "\n";
    }
}

inline void write_trace_meta(const TrialTrace& trace, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ParseError(path + ": cannot open for writing");
    for (const auto& [k, v] : trace.meta) out << k << " = " << v << "\n";
}

inline TrialTrace read_trace_csv(const std::string& path) {
    const auto lines = read_lines(path);
    if (lines.empty() || lines[0] != kTraceHeader)
        throw ParseError(path + ": line 1: expected header '" + kTraceHeader + "'");
    TrialTrace trace;
    double prev_encoder = -1.0;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        if (lines[i].empty()) continue;
        const auto fields = split_csv_line(lines[i]);
        if (fields.size() != 6)
            throw ParseError(path + ": line " + std::to_string(i + 1) +
                             ": expected 6 fields, got " +
                             std::to_string(fields.size()));
        TrialSample s;
        s.index = parse_long(fields[0], path, i + 1);
        s.encoder = parse_double(fields[1], path, i + 1);
        for (int j = 0; j < 3; ++j)
            s.dlambda_pm[j] = parse_double(fields[2 + j], path, i + 1);
        if (!fields[5].empty()) s.force = parse_double(fields[5], path, i + 1);
        if (s.encoder < prev_encoder)
            throw ParseError(path + ": line " + std::to_string(i + 1) +
                             ": encoder values must be nondecreasing");
        prev_encoder = s.encoder;
        trace.samples.push_back(s);
    }
    if (trace.samples.empty())
        throw ParseError(path + ": line 1: no samples");
    return trace;
}

inline std::map<std::string, std::string> read_meta(const std::string& path) {
    std::map<std::string, std::string> meta;
    for (const auto& line : read_lines(path)) {
        if (line.empty() || line[0] == '#') continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) continue;
        auto trim = [](std::string s) {
            const auto b = s.find_first_not_of(" \t");
            const auto e = s.find_last_not_of(" \t");
            return b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
        };
        meta[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
    }
    return meta;
}

} // namespace stiffbeam
