#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "stiffbeam/cross_section.hpp"
#include "stiffbeam/csv.hpp"
#include "stiffbeam/elastica.hpp"
#include "stiffbeam/errors.hpp"
#include "stiffbeam/estimator.hpp"
#include "stiffbeam/fbg.hpp"
#include "stiffbeam/trials.hpp"

namespace stiffbeam {

/// Flat key-value config: `section.key = value`, '#' comments, blank lines
/// ignored. Unknown or malformed keys are reported by name.
class KeyValueFile {
public:
    static KeyValueFile load(const std::string& path) {
        KeyValueFile kv;
        kv.path_ = path;
        std::size_t line_no = 0;
        for (const auto& raw : read_lines(path)) {
            ++line_no;
            std::string line = raw;
            const auto hash = line.find('#');
            if (hash != std::string::npos) line.erase(hash);
            if (line.find_first_not_of(" \t") == std::string::npos) continue;
            const auto eq = line.find('=');
            if (eq == std::string::npos)
                throw ParseError(path + ": line " + std::to_string(line_no) +
                                 ": expected 'key = value'");
            kv.values_[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
        }
        return kv;
    }

    bool has(const std::string& key) const { return values_.count(key) > 0; }

    std::string get_string(const std::string& key) const {
        auto it = values_.find(key);
        if (it == values_.end())
            throw InvalidInput(path_ + ": missing required key '" + key + "'");
        used_.insert(key);
        return it->second;
    }

    std::string get_string(const std::string& key, const std::string& dflt) const {
        used_.insert(key);
        auto it = values_.find(key);
        return it == values_.end() ? dflt : it->second;
    }

    double get_double(const std::string& key) const {
        return to_double(key, get_string(key));
    }

    double get_double(const std::string& key, double dflt) const {
        used_.insert(key);
        auto it = values_.find(key);
        return it == values_.end() ? dflt : to_double(key, it->second);
    }

    long get_long(const std::string& key, long dflt) const {
        used_.insert(key);
        auto it = values_.find(key);
        if (it == values_.end()) return dflt;
        try {
            return std::stol(it->second);
        } catch (const std::exception&) {
            throw InvalidInput(path_ + ": key '" + key + "': bad integer '" +
                               it->second + "'");
        }
    }

    std::vector<double> get_double_list(const std::string& key) const {
        std::vector<double> out;
        for (const auto& tok : split_list(get_string(key)))
            out.push_back(to_double(key, tok));
        return out;
    }

    /// Every key must be consumed by a getter; leftovers are typos.
    void reject_unused() const {
        for (const auto& [k, _] : values_)
            if (!used_.count(k))
                throw InvalidInput(path_ + ": unknown key '" + k + "'");
    }

    static std::string trim(std::string s) {
        const auto b = s.find_first_not_of(" \t");
        const auto e = s.find_last_not_of(" \t");
        return b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
    }

    static std::vector<std::string> split_list(const std::string& s) {
        std::vector<std::string> out;
        std::string tok;
        std::istringstream ss(s);
        while (std::getline(ss, tok, ',')) {
            tok = trim(tok);
            if (!tok.empty()) out.push_back(tok);
        }
        return out;
    }

private:
    double to_double(const std::string& key, const std::string& v) const {
        try {
            std::size_t pos = 0;
            const double d = std::stod(v, &pos);
            if (pos != v.size()) throw std::invalid_argument("trailing characters");
            return d;
        } catch (const std::exception&) {
            throw InvalidInput(path_ + ": key '" + key + "': bad number '" + v +
                               "'");
        }
    }

    std::string path_;
    std::map<std::string, std::string> values_;
    mutable std::set<std::string> used_;
};

struct NamedTissue {
    std::string name;
    TissueSpec tissue;
};

struct RunConfig {
    SectionGeometry section;
    std::vector<double> lengths;  // m
    double layout_first_start = 6e-3;
    double layout_pitch = 8e-3;
    double layout_span = 5e-3;
    double k_eps = 0.424;
    double s_T = 10.0;
    SolverConfig solver;
    double kappa_min = 2.0, kappa_max = 500.0;
    std::size_t kappa_count = 64;
    std::vector<NamedTissue> tissues;
    double tip_radius = 3.5e-3;
    TrialProtocol protocol;
    double estimator_nu = 0.0;
    bool threshold_auto = true;
    double strain_norm_threshold = 0.0;  // used when not auto
    double contact_force_threshold = 1e-3;
    double outlier_cap = 3e6;
    double confirmation_displacement = 2e-3;

    BeamSpec beam_for_length(double L) const {
        return make_beam_spec(section.r_fbg, section.r_wire, section.E_fbg,
                              section.E_wire, L, section.n_wires);
    }

    GratingLayout layout_for_beam(const BeamSpec& beam) const {
        GratingLayout layout = default_layout(beam.dy_fbg, layout_first_start,
                                              layout_pitch, layout_span);
        layout.k_eps = k_eps;
        layout.s_T = s_T;
        validate_layout(layout, beam.length);
        return layout;
    }

    std::vector<double> kappa_grid() const {
        return default_kappa_grid(kappa_min, kappa_max, kappa_count);
    }

    /// Auto threshold: 5x the noise sigma in strain units, floored well
    /// above solver tolerance for noiseless runs.
    double strain_threshold_for_sigma(double sigma_pm) const {
        if (!threshold_auto) return strain_norm_threshold;
        const double from_noise =
            sigma_pm > 0.0 ? default_strain_threshold(sigma_pm, k_eps) : 0.0;
        return std::max(from_noise, 1e-7);
    }

    EstimatorConfig estimator_for_sigma(double sigma_pm) const {
        EstimatorConfig cfg{};
        cfg.strain_norm_threshold = strain_threshold_for_sigma(sigma_pm);
        cfg.contact_force_threshold = contact_force_threshold;
        cfg.outlier_cap = outlier_cap;
        cfg.nu_assumed = estimator_nu;
        cfg.tip_radius = tip_radius;
        cfg.confirmation_displacement = confirmation_displacement;
        return cfg;
    }
};

inline RunConfig load_run_config(const std::string& path) {
    const KeyValueFile kv = KeyValueFile::load(path);
    RunConfig rc;

    rc.section.r_fbg = kv.get_double("beam.r_fbg_m");
    rc.section.r_wire = kv.get_double("beam.r_wire_m");
    rc.section.n_wires = static_cast<int>(kv.get_long("beam.n_wires", 4));
    rc.section.E_fbg = kv.get_double("beam.E_fbg_Pa");
    rc.section.E_wire = kv.get_double("beam.E_wire_Pa");
    for (double mm : kv.get_double_list("beam.lengths_mm")) {
        if (!(mm > 0.0))
            throw InvalidInput(path + ": key 'beam.lengths_mm': lengths must be positive");
        rc.lengths.push_back(mm * 1e-3);
    }
    if (rc.lengths.empty())
        throw InvalidInput(path + ": key 'beam.lengths_mm': at least one length required");

    rc.layout_first_start = kv.get_double("layout.first_start_mm", 6.0) * 1e-3;
    rc.layout_pitch = kv.get_double("layout.pitch_mm", 8.0) * 1e-3;
    rc.layout_span = kv.get_double("layout.span_mm", 5.0) * 1e-3;
    rc.k_eps = kv.get_double("layout.k_eps_pm_per_ue", 0.424);
    rc.s_T = kv.get_double("layout.s_T_pm_per_C", 10.0);

    rc.solver.step = kv.get_double("solver.step", 1e-3);
    rc.solver.eta_tol = kv.get_double("solver.eta_tol", 1e-10);
    rc.solver.samples =
        static_cast<std::size_t>(kv.get_long("solver.samples", 8192));
    rc.kappa_min = kv.get_double("solver.kappa_min", 2.0);
    rc.kappa_max = kv.get_double("solver.kappa_max", 500.0);
    rc.kappa_count =
        static_cast<std::size_t>(kv.get_long("solver.kappa_count", 64));

    rc.tip_radius = kv.get_double("tissue.R_tip_m", 3.5e-3);
    if (kv.has("tissues")) {
        for (const auto& entry : KeyValueFile::split_list(kv.get_string("tissues"))) {
            std::istringstream ss(entry);
            std::string name, e_str, nu_str;
            if (!std::getline(ss, name, ':') || !std::getline(ss, e_str, ':') ||
                !std::getline(ss, nu_str))
                throw InvalidInput(path + ": key 'tissues': expected "
                                   "'name:E_Pa:nu', got '" + entry + "'");
            NamedTissue nt;
            nt.name = KeyValueFile::trim(name);
            try {
                nt.tissue.E_t = std::stod(e_str);
                nt.tissue.nu = std::stod(nu_str);
            } catch (const std::exception&) {
                throw InvalidInput(path + ": key 'tissues': bad number in '" +
                                   entry + "'");
            }
            nt.tissue.R_tip = rc.tip_radius;
            validate_tissue(nt.tissue);
            rc.tissues.push_back(nt);
        }
    }

    rc.protocol.step = kv.get_double("protocol.step_m", 10e-6);
    rc.protocol.travel = kv.get_double("protocol.travel_m", 8e-3);
    rc.protocol.approach = kv.get_double("protocol.approach_m", 2.003e-3);
    rc.protocol.noise_sigma_pm = kv.get_double("protocol.noise_sigma_pm", 0.0);
    rc.protocol.seed =
        static_cast<std::uint64_t>(kv.get_long("protocol.seed", 1));

    rc.estimator_nu = kv.get_double("estimator.nu", 0.5);
    const std::string thr = kv.get_string("estimator.strain_norm_threshold", "auto");
    if (thr == "auto") {
        rc.threshold_auto = true;
    } else {
        rc.threshold_auto = false;
        try {
            rc.strain_norm_threshold = std::stod(thr);
        } catch (const std::exception&) {
            throw InvalidInput(path + ": key 'estimator.strain_norm_threshold': "
                               "expected 'auto' or a number, got '" + thr + "'");
        }
        if (!(rc.strain_norm_threshold > 0.0))
            throw InvalidInput(path + ": key 'estimator.strain_norm_threshold': "
                               "must be positive");
    }
    rc.contact_force_threshold =
        kv.get_double("estimator.contact_force_threshold_N", 1e-3);
    rc.outlier_cap = kv.get_double("estimator.outlier_cap_Pa", 3e6);
    rc.confirmation_displacement =
        kv.get_double("estimator.confirmation_displacement_m", 2e-3);

    kv.reject_unused();
    return rc;
}

} // namespace stiffbeam
