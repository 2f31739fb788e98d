#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "stiffbeam/elastica.hpp"
#include "stiffbeam/errors.hpp"
#include "stiffbeam/fbg.hpp"
#include "stiffbeam/trials.hpp"

namespace stiffbeam {

struct EstimatorConfig {
    double strain_norm_threshold;             // Euclidean norm of 3 avg strains
    double contact_force_threshold = 1e-3;    // N
    std::optional<long> contact_index_override;
    double outlier_cap = 3e6;                 // Pa
    double nu_assumed;                        // no default; known per tissue
    double tip_radius = 3.5e-3;               // m
    double confirmation_displacement = 2e-3;  // read P this far past onset, m
};

/// Default detection threshold: 5x the per-channel noise sigma converted
/// to strain through the calibration coefficient.
inline double default_strain_threshold(double noise_sigma_pm, double k_eps) {
    if (k_eps == 0.0)
        throw InvalidInput("default_strain_threshold: k_eps must be nonzero");
    return 5.0 * noise_sigma_pm / k_eps * 1e-6;
}

struct StiffnessEstimate {
    double E_t = 0.0;     // Pa
    long contact_index = -1;
    long buckling_index = -1;
    double delta_i = 0.0; // m
    double P = 0.0;       // N
    double beam_length_at_buckling = 0.0;  // m
    bool outlier = false;
};

/// First index with force >= threshold; an explicit override wins.
inline long detect_contact(const TrialTrace& trace, const EstimatorConfig& cfg) {
    if (cfg.contact_index_override) return *cfg.contact_index_override;
    bool any_force = false;
    for (const auto& s : trace.samples) {
        if (!s.force) continue;
        any_force = true;
        if (*s.force >= cfg.contact_force_threshold) return s.index;
    }
    if (!any_force)
        throw MissingContactSource("detect_contact: trace has no force channel "
                                   "and no contact index override");
    throw NoContact("detect_contact: force never reached threshold " +
                    std::to_string(cfg.contact_force_threshold) + " N");
}

/// First index where the Euclidean norm of the three per-peak average
/// strains crosses the threshold.
inline long detect_buckling(const TrialTrace& trace, const GratingLayout& layout,
                            const EstimatorConfig& cfg) {
    if (!(cfg.strain_norm_threshold > 0.0))
        throw InvalidInput("detect_buckling: strain_norm_threshold must be positive");
    for (const auto& s : trace.samples) {
        double norm2 = 0.0;
        for (int j = 0; j < 3; ++j) {
            const double eps = strain_from_wavelength(s.dlambda_pm[j], layout);
            norm2 += eps * eps;
        }
        if (std::sqrt(norm2) >= cfg.strain_norm_threshold) return s.index;
    }
    throw NoBuckling("detect_buckling: strain norm never reached threshold; "
                     "trial incomplete");
}

namespace detail {

inline const TrialSample& sample_at(const TrialTrace& trace, long index,
                                    const char* who) {
    for (const auto& s : trace.samples)
        if (s.index == index) return s;
    throw InvalidInput(std::string(who) + ": index " + std::to_string(index) +
                       " not present in trace");
}

} // namespace detail

/// delta_i = encoder(buckling) - encoder(contact); P read from the
/// force-displacement curve a fixed confirmation displacement past onset
/// (the model is unreliable immediately post-onset); then the spherical
/// indenter equation E_t = (3/4) P (1 - nu^2) / sqrt(delta_i^3 R_tip).
inline StiffnessEstimate estimate_stiffness(const TrialTrace& trace,
                                            const BeamSpec& beam,
                                            const GratingLayout& layout,
                                            const EstimatorConfig& cfg,
                                            const ForceDisplacementCurve& curve) {
    StiffnessEstimate est;
    est.contact_index = detect_contact(trace, cfg);
    est.buckling_index = detect_buckling(trace, layout, cfg);
    const double enc_contact =
        detail::sample_at(trace, est.contact_index, "estimate_stiffness").encoder;
    const double enc_buckle =
        detail::sample_at(trace, est.buckling_index, "estimate_stiffness").encoder;
    est.delta_i = enc_buckle - enc_contact;
    if (est.delta_i <= 0.0)
        throw SingularIndentation(
            "estimate_stiffness: delta_i = " + std::to_string(est.delta_i) +
            " m; rigid surface or detection failure");
    est.beam_length_at_buckling =
        trace.beam_length > 0.0 ? trace.beam_length : beam.length;
    est.P = force_at_displacement(curve, cfg.confirmation_displacement);
    est.E_t = 0.75 * est.P * (1.0 - cfg.nu_assumed * cfg.nu_assumed) /
              std::sqrt(est.delta_i * est.delta_i * est.delta_i * cfg.tip_radius);
    est.outlier = est.E_t > cfg.outlier_cap;
    return est;
}

// --- batch summary statistics (Table-style RMSE / IQR semantics) ---

/// Linear-interpolation quantile on sorted data (numpy default convention).
inline double quantile(std::vector<double> v, double q) {
    if (v.empty()) throw InvalidInput("quantile: empty sample");
    std::sort(v.begin(), v.end());
    const double pos = q * static_cast<double>(v.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(pos);
    if (lo + 1 >= v.size()) return v.back();
    const double w = pos - static_cast<double>(lo);
    return v[lo] + w * (v[lo + 1] - v[lo]);
}

inline double interquartile_range(const std::vector<double>& v) {
    return quantile(v, 0.75) - quantile(v, 0.25);
}

inline double rmse_about(const std::vector<double>& v, double reference) {
    if (v.empty()) throw InvalidInput("rmse_about: empty sample");
    double acc = 0.0;
    for (double x : v) acc += (x - reference) * (x - reference);
    return std::sqrt(acc / static_cast<double>(v.size()));
}

inline double median(std::vector<double> v) { return quantile(std::move(v), 0.5); }

struct BatchSummary {
    std::size_t n_total = 0;
    std::size_t n_outliers = 0;  // excluded from the statistics below
    double median_E = 0.0;
    double iqr = 0.0;
    std::optional<double> rmse;  // present when ground truth is known
};

inline BatchSummary summarize_batch(const std::vector<StiffnessEstimate>& ests,
                                    std::optional<double> actual_E = {}) {
    BatchSummary s;
    s.n_total = ests.size();
    std::vector<double> kept;
    for (const auto& e : ests) {
        if (e.outlier) {
            ++s.n_outliers;
            continue;
        }
        kept.push_back(e.E_t);
    }
    if (kept.empty()) return s;
    s.median_E = median(kept);
    s.iqr = interquartile_range(kept);
    if (actual_E) s.rmse = rmse_about(kept, *actual_E);
    return s;
}

} // namespace stiffbeam
