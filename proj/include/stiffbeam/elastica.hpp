#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "stiffbeam/cross_section.hpp"
#include "stiffbeam/errors.hpp"

namespace stiffbeam {

// Normalized post-buckling BVP:
//   theta'' + kappa sin(theta) + cos(theta) = 0
//   eta' = sin(theta)
//   theta(0) = 0,  theta'(t_end) = 0,  eta(t_end) = 0
// with t = s sqrt(R/EI), eta = y sqrt(R/EI), kappa = P/R.
//
// theta'(t) vanishes twice along the first buckled mode: once at the
// interior inflection point (zero bending moment inside the span) and
// once at the pinned end. t_end is the second zero; the terminal residual
// eta(t_end) only changes sign over the slope0 bracket there.

struct SolverConfig {
    double step = 1e-3;           // RK4 step in t
    double t_max = 60.0;          // arc-length cap before declaring divergence
    double eta_tol = 1e-10;       // |eta(t_end)| convergence target
    double bracket_lo = 1e-4;     // initial slope0 bracket
    double bracket_hi = 2.0;
    int max_bracket_expand = 8;
    int max_root_iter = 200;
    std::size_t samples = 8192;   // uniform output grid size (intervals)
};

struct NormalizedSolution {
    double kappa = 0.0;
    double slope0 = 0.0;
    double t_end = 0.0;
    std::vector<double> theta_samples;   // theta(t) on uniform grid [0, t_end]
    std::vector<double> dtheta_samples;  // dtheta/dt on the same grid
    std::vector<double> eta_samples;     // eta(t) on the same grid
};

struct PostBuckleSolution {
    BeamSpec beam;
    double kappa = 0.0;
    double slope0 = 0.0;
    double t_end = 0.0;
    double P = 0.0;  // axial load, N
    double R = 0.0;  // lateral reaction, N
    std::vector<double> s_grid;     // m
    std::vector<double> theta;      // rad
    std::vector<double> curvature;  // 1/m
    std::vector<double> x;          // m
    std::vector<double> y;          // m
    double end_shortening = 0.0;    // m
};

namespace detail {

struct State {
    double th, w, eta;
};

inline State deriv(double kappa, const State& y) {
    return {y.w, -kappa * std::sin(y.th) - std::cos(y.th), std::sin(y.th)};
}

inline State rk4_step(double kappa, const State& y, double h) {
    const State k1 = deriv(kappa, y);
    const State k2 = deriv(kappa, {y.th + 0.5 * h * k1.th, y.w + 0.5 * h * k1.w,
                                   y.eta + 0.5 * h * k1.eta});
    const State k3 = deriv(kappa, {y.th + 0.5 * h * k2.th, y.w + 0.5 * h * k2.w,
                                   y.eta + 0.5 * h * k2.eta});
    const State k4 = deriv(kappa, {y.th + h * k3.th, y.w + h * k3.w,
                                   y.eta + h * k3.eta});
    return {y.th + h / 6.0 * (k1.th + 2.0 * k2.th + 2.0 * k3.th + k4.th),
            y.w + h / 6.0 * (k1.w + 2.0 * k2.w + 2.0 * k3.w + k4.w),
            y.eta + h / 6.0 * (k1.eta + 2.0 * k2.eta + 2.0 * k3.eta + k4.eta)};
}

struct EventResult {
    bool hit = false;
    double t_end = 0.0;
    State y_end{};
};

// Integrate until the second zero of w = dtheta/dt, localizing the event
// by bisection on the bracketing step.
inline EventResult integrate_to_event(double kappa, double slope0,
                                      const SolverConfig& cfg) {
    State y{0.0, slope0, 0.0};
    double t = 0.0;
    int crossings = 0;
    const double h = cfg.step;
    while (t < cfg.t_max) {
        const State ynew = rk4_step(kappa, y, h);
        if (y.w * ynew.w <= 0.0 && y.w != ynew.w) {
            ++crossings;
            if (crossings == 2) {
                const double sgn = (y.w > 0.0) ? 1.0 : -1.0;
                double a = 0.0, b = h;
                State yb = ynew;
                for (int i = 0; i < 80 && (b - a) > 0.0; ++i) {
                    const double m = 0.5 * (a + b);
                    const State ym = rk4_step(kappa, y, m);
                    if (sgn * ym.w <= 0.0) {
                        b = m;
                        yb = ym;
                    } else {
                        a = m;
                    }
                }
                return {true, t + b, yb};
            }
        }
        y = ynew;
        t += h;
    }
    return {};
}

} // namespace detail

/// Shoot on slope0 = dtheta/dt(0) until eta(t_end) = 0. Bracketed bisection
/// with secant acceleration; the bracket expands upward if the residual does
/// not change sign over the initial one.
inline NormalizedSolution solve_normalized(double kappa,
                                           const SolverConfig& cfg = {}) {
    if (!(kappa > 0.0) || !std::isfinite(kappa))
        throw InvalidInput("solve_normalized: kappa must be positive and finite");

    auto residual = [&](double slope0) {
        const detail::EventResult ev = detail::integrate_to_event(kappa, slope0, cfg);
        if (!ev.hit)
            throw DivergenceError(
                "solve_normalized: no second dtheta/dt zero before t_max (kappa=" +
                std::to_string(kappa) + ")");
        return std::pair<double, double>{ev.y_end.eta, ev.t_end};
    };

    double a = cfg.bracket_lo, b = cfg.bracket_hi;
    auto [fa, ta] = residual(a);
    auto [fb, tb] = residual(b);
    for (int i = 0; i < cfg.max_bracket_expand && fa * fb > 0.0; ++i) {
        a = b;
        fa = fb;
        b *= 2.0;
        std::tie(fb, tb) = residual(b);
    }
    if (fa * fb > 0.0)
        throw NoBuckledSolution(
            "solve_normalized: eta(t_end) does not change sign over slope0 "
            "bracket (kappa=" + std::to_string(kappa) + ")");

    double slope0 = a, f = fa, t_end = ta;
    for (int it = 0; it < cfg.max_root_iter; ++it) {
        // secant proposal, fall back to bisection when it leaves the bracket
        double m = a - fa * (b - a) / (fb - fa);
        if (!(m > a) || !(m < b)) m = 0.5 * (a + b);
        auto [fm, tm] = residual(m);
        slope0 = m;
        f = fm;
        t_end = tm;
        if (std::abs(fm) <= cfg.eta_tol) break;
        if (fa * fm <= 0.0) {
            b = m;
            fb = fm;
        } else {
            a = m;
            fa = fm;
        }
        if (b - a <= 1e-16 * std::max(1.0, b)) break;
    }
    if (std::abs(f) > cfg.eta_tol)
        throw SolverError("solve_normalized: slope0 iteration did not reach "
                          "eta tolerance (kappa=" + std::to_string(kappa) + ")");

    // re-integrate on a uniform grid over [0, t_end]
    NormalizedSolution sol;
    sol.kappa = kappa;
    sol.slope0 = slope0;
    sol.t_end = t_end;
    const std::size_t n = cfg.samples;
    sol.theta_samples.resize(n + 1);
    sol.dtheta_samples.resize(n + 1);
    sol.eta_samples.resize(n + 1);
    detail::State y{0.0, slope0, 0.0};
    const double h = t_end / static_cast<double>(n);
    sol.theta_samples[0] = y.th;
    sol.dtheta_samples[0] = y.w;
    sol.eta_samples[0] = y.eta;
    for (std::size_t i = 0; i < n; ++i) {
        y = detail::rk4_step(kappa, y, h);
        sol.theta_samples[i + 1] = y.th;
        sol.dtheta_samples[i + 1] = y.w;
        sol.eta_samples[i + 1] = y.eta;
    }
    return sol;
}

/// Dimensional recovery: R = EI (t_end/L)^2, P = kappa R, s = t L / t_end.
/// The EI factor is required by the substitution t = s sqrt(R/EI).
inline PostBuckleSolution denormalize(const NormalizedSolution& norm,
                                      const BeamSpec& beam) {
    if (!(beam.EI > 0.0) || !(beam.length > 0.0))
        throw InvalidInput("denormalize: beam must have positive EI and length");
    if (norm.theta_samples.size() < 2 || !(norm.t_end > 0.0))
        throw InvalidInput("denormalize: normalized solution is empty");

    PostBuckleSolution sol;
    sol.beam = beam;
    sol.kappa = norm.kappa;
    sol.slope0 = norm.slope0;
    sol.t_end = norm.t_end;
    const double L = beam.length;
    const double ratio = norm.t_end / L;  // sqrt(R/EI)
    sol.R = beam.EI * ratio * ratio;
    sol.P = norm.kappa * sol.R;

    const std::size_t n = norm.theta_samples.size();
    sol.s_grid.resize(n);
    sol.theta = norm.theta_samples;
    sol.curvature.resize(n);
    sol.x.resize(n);
    sol.y.resize(n);
    const double ds = L / static_cast<double>(n - 1);
    for (std::size_t i = 0; i < n; ++i) {
        sol.s_grid[i] = static_cast<double>(i) * ds;
        sol.curvature[i] = norm.dtheta_samples[i] * ratio;
        sol.y[i] = norm.eta_samples[i] / ratio;
    }
    // x by composite trapezoid of cos(theta)
    sol.x[0] = 0.0;
    for (std::size_t i = 1; i < n; ++i)
        sol.x[i] = sol.x[i - 1] +
                   0.5 * ds * (std::cos(sol.theta[i - 1]) + std::cos(sol.theta[i]));
    sol.end_shortening = L - sol.x[n - 1];
    return sol;
}

/// L - integral of cos(theta) ds, composite trapezoid on the solution grid.
inline double end_shortening(const PostBuckleSolution& sol) {
    const std::size_t n = sol.theta.size();
    if (n < 2) throw InvalidInput("end_shortening: empty solution");
    const double ds = sol.beam.length / static_cast<double>(n - 1);
    double proj = 0.0;
    for (std::size_t i = 1; i < n; ++i)
        proj += 0.5 * ds * (std::cos(sol.theta[i - 1]) + std::cos(sol.theta[i]));
    return sol.beam.length - proj;
}

struct CurvePoint {
    double kappa;
    double slope0;
    double t_end;
    double P;
    double R;
    double end_shortening;
};

struct ForceDisplacementCurve {
    std::vector<CurvePoint> points;        // sorted by end_shortening
    std::vector<std::string> warnings;     // per-kappa solver failures
};

/// Default sweep: 64 log-spaced points over [2, 500].
inline std::vector<double> default_kappa_grid(double lo = 2.0, double hi = 500.0,
                                              std::size_t count = 64) {
    std::vector<double> grid(count);
    for (std::size_t i = 0; i < count; ++i) {
        const double f = count == 1 ? 0.0
                                    : static_cast<double>(i) /
                                          static_cast<double>(count - 1);
        grid[i] = lo * std::pow(hi / lo, f);
    }
    return grid;
}

/// Solve the normalized branch point-by-point, skipping unsolvable kappas
/// with a warning record. Results come back in kappa order. The normalized
/// problem does not involve the beam, so one branch serves every length.
inline std::vector<NormalizedSolution> solve_normalized_branch(
    const std::vector<double>& kappa_grid, const SolverConfig& cfg = {},
    std::vector<std::string>* warnings = nullptr) {
    std::vector<NormalizedSolution> out;
    out.reserve(kappa_grid.size());
    for (double k : kappa_grid) {
        try {
            out.push_back(solve_normalized(k, cfg));
        } catch (const SolverError& e) {
            if (warnings) warnings->push_back(e.what());
        }
    }
    return out;
}

inline std::vector<PostBuckleSolution> denormalize_branch(
    const std::vector<NormalizedSolution>& norms, const BeamSpec& beam) {
    std::vector<PostBuckleSolution> out;
    out.reserve(norms.size());
    for (const auto& n : norms) out.push_back(denormalize(n, beam));
    return out;
}

inline std::vector<PostBuckleSolution> solve_branch(
    const BeamSpec& beam, const std::vector<double>& kappa_grid,
    const SolverConfig& cfg = {}, std::vector<std::string>* warnings = nullptr) {
    return denormalize_branch(solve_normalized_branch(kappa_grid, cfg, warnings),
                              beam);
}

inline ForceDisplacementCurve force_displacement_curve(
    const BeamSpec& beam, const std::vector<double>& kappa_grid,
    const SolverConfig& cfg = {}) {
    ForceDisplacementCurve curve;
    const auto sols = solve_branch(beam, kappa_grid, cfg, &curve.warnings);
    curve.points.reserve(sols.size());
    for (const auto& s : sols)
        curve.points.push_back(
            {s.kappa, s.slope0, s.t_end, s.P, s.R, s.end_shortening});
    std::sort(curve.points.begin(), curve.points.end(),
              [](const CurvePoint& a, const CurvePoint& b) {
                  return a.end_shortening < b.end_shortening;
              });
    return curve;
}

/// Piecewise-linear P at a given end-shortening.
inline double force_at_displacement(const ForceDisplacementCurve& curve,
                                    double delta) {
    const auto& pts = curve.points;
    if (pts.size() < 2)
        throw InvalidInput("force_at_displacement: curve needs >= 2 points");
    if (delta < pts.front().end_shortening || delta > pts.back().end_shortening) {
        const bool below = delta < pts.front().end_shortening;
        const CurvePoint& nearest = below ? pts.front() : pts.back();
        throw RangeError("force_at_displacement: query " + std::to_string(delta) +
                         " m outside curve range; nearest endpoint at " +
                         std::to_string(nearest.end_shortening) + " m (P = " +
                         std::to_string(nearest.P) + " N)");
    }
    auto it = std::lower_bound(pts.begin(), pts.end(), delta,
                               [](const CurvePoint& p, double v) {
                                   return p.end_shortening < v;
                               });
    if (it == pts.begin()) return it->P;
    const CurvePoint& hi = *it;
    const CurvePoint& lo = *(it - 1);
    const double w = (delta - lo.end_shortening) /
                     (hi.end_shortening - lo.end_shortening);
    return lo.P + w * (hi.P - lo.P);
}

} // namespace stiffbeam
