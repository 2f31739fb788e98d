// Command-line front end for the buckling-beam stiffness sensing pipeline.
// Subcommands:
//   curve     force-displacement and per-peak strain curves per beam length
//   simulate  synthetic indentation trials against the configured tissues
//   estimate  tissue modulus estimates from trial trace files

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "stiffbeam/config.hpp"
#include "stiffbeam/csv.hpp"
#include "stiffbeam/elastica.hpp"
#include "stiffbeam/estimator.hpp"
#include "stiffbeam/fbg.hpp"
#include "stiffbeam/trials.hpp"

namespace fs = std::filesystem;
using namespace stiffbeam;

namespace {

std::string length_tag(double L_m) {
    // 0.042 -> "42"; fractional millimetres keep their digits
    return fmt12(L_m * 1e3);
}

void write_curve_csv(const ForceDisplacementCurve& curve, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ParseError(path + ": cannot open for writing");
    out << "kappa,slope0,t_end,P_N,R_N,end_shortening_m\n";
    for (const auto& p : curve.points)
        out << fmt12(p.kappa) << ',' << fmt12(p.slope0) << ',' << fmt12(p.t_end)
            << ',' << fmt12(p.P) << ',' << fmt12(p.R) << ','
            << fmt12(p.end_shortening) << "\n";
}

void write_strain_csv(const StrainCurve& curve, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ParseError(path + ": cannot open for writing");
    out << "end_shortening_m,eps_avg_1,eps_avg_2,eps_avg_3\n";
    for (const auto& k : curve.knots)
        out << fmt12(k.end_shortening) << ',' << fmt12(k.eps[0]) << ','
            << fmt12(k.eps[1]) << ',' << fmt12(k.eps[2]) << "\n";
}

ForceDisplacementCurve curve_from_branch(
    const std::vector<NormalizedSolution>& branch, const BeamSpec& beam) {
    ForceDisplacementCurve fd;
    for (const auto& sol : denormalize_branch(branch, beam))
        fd.points.push_back({sol.kappa, sol.slope0, sol.t_end, sol.P, sol.R,
                             sol.end_shortening});
    std::sort(fd.points.begin(), fd.points.end(),
              [](const CurvePoint& a, const CurvePoint& b) {
                  return a.end_shortening < b.end_shortening;
              });
    return fd;
}

int cmd_curve(const RunConfig& rc, const fs::path& out_dir) {
    std::vector<std::string> warnings;
    const auto branch =
        solve_normalized_branch(rc.kappa_grid(), rc.solver, &warnings);
    for (const auto& w : warnings) std::cerr << "warning: " << w << "\n";
    for (double L : rc.lengths) {
        const BeamSpec beam = rc.beam_for_length(L);
        const GratingLayout layout = rc.layout_for_beam(beam);
        const StrainCurve sc = build_strain_curve_from_branch(beam, layout, branch);
        const ForceDisplacementCurve fd = curve_from_branch(branch, beam);
        const std::string tag = length_tag(L);
        write_curve_csv(fd, (out_dir / ("curve_L" + tag + ".csv")).string());
        write_strain_csv(sc, (out_dir / ("strain_L" + tag + ".csv")).string());
        std::cout << "curve: L = " << tag << " mm, " << fd.points.size()
                  << " points\n";
    }
    return 0;
}

int cmd_simulate(const RunConfig& rc, const fs::path& out_dir,
                 std::optional<std::uint64_t> seed_override) {
    if (rc.tissues.empty()) {
        std::cerr << "warning: no tissues configured; nothing to simulate\n";
        return 0;
    }
    std::uint64_t seed = seed_override.value_or(rc.protocol.seed);
    std::vector<std::string> warnings;
    const auto branch =
        solve_normalized_branch(rc.kappa_grid(), rc.solver, &warnings);
    for (const auto& w : warnings) std::cerr << "warning: " << w << "\n";
    for (double L : rc.lengths) {
        const BeamSpec beam = rc.beam_for_length(L);
        const GratingLayout layout = rc.layout_for_beam(beam);
        const StrainCurve curve =
            build_strain_curve_from_branch(beam, layout, branch);
        for (const auto& nt : rc.tissues) {
            TrialProtocol protocol = rc.protocol;
            protocol.seed = seed++;
            const TrialTrace trace =
                simulate_trial(beam, nt.tissue, layout, protocol, curve);
            const std::string stem =
                "trial_" + nt.name + "_" + length_tag(L);
            write_trace_csv(trace, (out_dir / (stem + ".csv")).string());
            write_trace_meta(trace, (out_dir / (stem + ".meta")).string());
            std::cout << "simulate: " << stem << ".csv ("
                      << trace.samples.size() << " samples)\n";
        }
    }
    return 0;
}

int cmd_estimate(const RunConfig& rc, const fs::path& out_dir,
                 const std::vector<std::string>& trace_files) {
    std::ofstream report(out_dir / "estimates.csv");
    if (!report) throw ParseError("estimates.csv: cannot open for writing");
    report << "trace_id,E_t_Pa,delta_i_m,P_N,contact_idx,buckling_idx,outlier\n";

    // normalized branch solved once; dimensional curves cached per length
    std::optional<std::vector<NormalizedSolution>> branch;
    std::map<std::string, ForceDisplacementCurve> curves;
    struct Group {
        std::vector<StiffnessEstimate> ests;
        std::optional<double> actual_E;
    };
    std::map<std::string, Group> groups;

    for (const auto& file : trace_files) {
        TrialTrace trace = read_trace_csv(file);
        const std::string meta_path = file.substr(0, file.rfind('.')) + ".meta";
        if (fs::exists(meta_path)) trace.meta = read_meta(meta_path);

        double L = rc.lengths.front();
        if (auto it = trace.meta.find("beam_length_m"); it != trace.meta.end())
            L = std::stod(it->second);
        trace.beam_length = L;
        double sigma = rc.protocol.noise_sigma_pm;
        if (auto it = trace.meta.find("noise_sigma_pm"); it != trace.meta.end())
            sigma = std::stod(it->second);

        const BeamSpec beam = rc.beam_for_length(L);
        const GratingLayout layout = rc.layout_for_beam(beam);
        const std::string tag = length_tag(L);
        if (!curves.count(tag)) {
            if (!branch)
                branch = solve_normalized_branch(rc.kappa_grid(), rc.solver);
            curves[tag] = curve_from_branch(*branch, beam);
        }

        const EstimatorConfig cfg = rc.estimator_for_sigma(sigma);
        const StiffnessEstimate est =
            estimate_stiffness(trace, beam, layout, cfg, curves[tag]);

        const std::string trace_id = fs::path(file).stem().string();
        report << trace_id << ',' << fmt12(est.E_t) << ',' << fmt12(est.delta_i)
               << ',' << fmt12(est.P) << ',' << est.contact_index << ','
               << est.buckling_index << ',' << (est.outlier ? 1 : 0) << "\n";

        std::string group_name = "all";
        if (auto it = trace.meta.find("tissue_E_Pa"); it != trace.meta.end()) {
            group_name = it->second;
            groups[group_name].actual_E = std::stod(it->second);
        }
        groups[group_name].ests.push_back(est);
    }

    std::ofstream summary(out_dir / "summary.txt");
    summary << "group  n  outliers_removed  median_E (KPa)  IQR (KPa)  RMSE (KPa)\n";
    for (const auto& [name, g] : groups) {
        const BatchSummary s = summarize_batch(g.ests, g.actual_E);
        summary << name << "  " << s.n_total << "  " << s.n_outliers << "  "
                << fmt12(s.median_E / 1e3) << "  " << fmt12(s.iqr / 1e3) << "  "
                << (s.rmse ? fmt12(*s.rmse / 1e3) : std::string("-")) << "\n";
    }
    std::cout << "estimate: " << trace_files.size() << " traces -> "
              << (out_dir / "estimates.csv").string() << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Buckling-beam tissue stiffness sensing pipeline"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir = ".";
    std::optional<std::uint64_t> seed;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "key-value config file")
            ->required();
        sub->add_option("--out", out_dir, "output directory");
        sub->add_option("--seed", seed, "override the config seed");
    };

    CLI::App* curve = app.add_subcommand("curve", "force-displacement curves");
    add_common(curve);
    CLI::App* simulate = app.add_subcommand("simulate", "synthetic trials");
    add_common(simulate);
    CLI::App* estimate = app.add_subcommand("estimate", "stiffness estimates");
    add_common(estimate);
    std::vector<std::string> trace_files;
    estimate->add_option("traces", trace_files, "trial trace CSV files")
        ->required();

    CLI11_PARSE(app, argc, argv);

    try {
        const RunConfig rc = load_run_config(config_path);
        fs::create_directories(out_dir);
        if (curve->parsed()) return cmd_curve(rc, out_dir);
        if (simulate->parsed()) return cmd_simulate(rc, out_dir, seed);
        if (estimate->parsed()) return cmd_estimate(rc, out_dir, trace_files);
    } catch (const InvalidInput& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const ParseError& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
