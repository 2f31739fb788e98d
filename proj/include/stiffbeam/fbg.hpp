#pragma once

#include <cmath>
#include <cstddef>
#include <utility>
#include <vector>

#include "stiffbeam/elastica.hpp"
#include "stiffbeam/errors.hpp"

namespace stiffbeam {

/// Grating spans along the beam arc plus calibration coefficients.
/// k_eps is in pm per microstrain; the glued default comes from the
/// post-assembly calibration slope. s_T is retained in the data model
/// but never exercised (constant-temperature assumption).
struct GratingLayout {
    std::vector<std::pair<double, double>> peaks;  // (s_start, s_end), m
    double k_eps = 0.424;    // pm / microstrain (glued); pristine fiber: 1.2
    double s_T = 10.0;       // pm / degC
    double dy_fbg = 0.0;     // fiber offset from neutral axis, m
};

/// Three 5 mm gratings at 8 mm pitch, first span starting 6 mm from the
/// fixed end. Positions are configurable; these are the shipped defaults.
inline GratingLayout default_layout(double dy_fbg, double first_start = 6e-3,
                                    double pitch = 8e-3, double span = 5e-3,
                                    std::size_t count = 3) {
    GratingLayout layout;
    layout.dy_fbg = dy_fbg;
    for (std::size_t i = 0; i < count; ++i) {
        const double s0 = first_start + static_cast<double>(i) * pitch;
        layout.peaks.emplace_back(s0, s0 + span);
    }
    return layout;
}

inline void validate_layout(const GratingLayout& layout, double beam_length) {
    if (!(layout.k_eps > 0.0))
        throw InvalidInput("GratingLayout: k_eps must be strictly positive");
    double prev_end = -1.0;
    for (const auto& [s0, s1] : layout.peaks) {
        if (!(s0 >= 0.0) || !(s1 <= beam_length) || !(s0 < s1))
            throw InvalidInput("GratingLayout: peak span outside [0, L] or empty");
        if (s0 < prev_end)
            throw InvalidInput("GratingLayout: peak spans overlap or are unordered");
        prev_end = s1;
    }
}

/// eps(s) = dy_fbg * dtheta/ds at each grid point.
inline std::vector<double> strain_field(const PostBuckleSolution& sol,
                                        double dy_fbg) {
    std::vector<double> eps(sol.curvature.size());
    for (std::size_t i = 0; i < eps.size(); ++i)
        eps[i] = dy_fbg * sol.curvature[i];
    return eps;
}

namespace detail {

// theta at arbitrary s via cubic Hermite on the uniform grid (theta and
// dtheta/ds are both known at the nodes).
inline double theta_hermite(const PostBuckleSolution& sol, double s) {
    const std::size_t n = sol.theta.size();
    const double ds = sol.beam.length / static_cast<double>(n - 1);
    double u = s / ds;
    std::size_t i = static_cast<std::size_t>(u);
    if (i >= n - 1) i = n - 2;
    const double x = u - static_cast<double>(i);
    const double p0 = sol.theta[i], p1 = sol.theta[i + 1];
    const double m0 = sol.curvature[i] * ds, m1 = sol.curvature[i + 1] * ds;
    const double x2 = x * x, x3 = x2 * x;
    return (2.0 * x3 - 3.0 * x2 + 1.0) * p0 + (x3 - 2.0 * x2 + x) * m0 +
           (-2.0 * x3 + 3.0 * x2) * p1 + (x3 - x2) * m1;
}

// integral of curvature over [s1, s2]: composite trapezoid over interior
// nodes, linear interpolation for the partial end cells.
inline double curvature_integral(const PostBuckleSolution& sol, double s1,
                                 double s2) {
    const std::size_t n = sol.curvature.size();
    const double ds = sol.beam.length / static_cast<double>(n - 1);
    auto value_at = [&](double s) {
        double u = s / ds;
        std::size_t i = static_cast<std::size_t>(u);
        if (i >= n - 1) i = n - 2;
        const double x = u - static_cast<double>(i);
        return (1.0 - x) * sol.curvature[i] + x * sol.curvature[i + 1];
    };
    const std::size_t i1 = static_cast<std::size_t>(std::ceil(s1 / ds));
    const std::size_t i2 = static_cast<std::size_t>(std::floor(s2 / ds));
    if (i1 > i2 || i2 >= n) {
        // span inside a single cell
        return 0.5 * (value_at(s1) + value_at(s2)) * (s2 - s1);
    }
    double acc = 0.0;
    const double sa = static_cast<double>(i1) * ds;
    const double sb = static_cast<double>(i2) * ds;
    if (s1 < sa) acc += 0.5 * (value_at(s1) + sol.curvature[i1]) * (sa - s1);
    for (std::size_t i = i1; i < i2; ++i)
        acc += 0.5 * ds * (sol.curvature[i] + sol.curvature[i + 1]);
    if (s2 > sb) acc += 0.5 * (sol.curvature[i2] + value_at(s2)) * (s2 - sb);
    return acc;
}

} // namespace detail

/// Mean strain over [s1, s2]. Computed two ways: quadrature of the strain
/// field, and the closed form dy_fbg (theta(s2) - theta(s1)) / (s2 - s1).
/// The routes must agree to 1e-9; disagreement signals a corrupted solution.
inline double average_strain(const PostBuckleSolution& sol,
                             std::pair<double, double> span, double dy_fbg) {
    const auto [s1, s2] = span;
    if (!(s1 >= 0.0) || !(s2 <= sol.beam.length) || !(s1 < s2))
        throw InvalidInput("average_strain: span outside [0, L] or empty");
    const double quad =
        dy_fbg * detail::curvature_integral(sol, s1, s2) / (s2 - s1);
    const double closed = dy_fbg *
                          (detail::theta_hermite(sol, s2) -
                           detail::theta_hermite(sol, s1)) /
                          (s2 - s1);
    if (std::abs(quad - closed) > 1e-9)
        throw SolverError("average_strain: quadrature and theta-difference "
                          "routes disagree beyond 1e-9");
    return quad;
}

/// Eq.-(1)-style forward model: dlambda = k_eps * eps[microstrain] + s_T * dT,
/// result in pm. eps enters dimensionless and is converted here, the single
/// conversion point.
inline double wavelength_shift(double eps, double dT,
                               const GratingLayout& layout) {
    return layout.k_eps * (eps * 1e6) + layout.s_T * dT;
}

/// Inverse at dT = 0: eps = dlambda / k_eps, back to dimensionless strain.
inline double strain_from_wavelength(double dlambda_pm,
                                     const GratingLayout& layout) {
    if (layout.k_eps == 0.0)
        throw InvalidInput("strain_from_wavelength: k_eps must be nonzero");
    return dlambda_pm / layout.k_eps * 1e-6;
}

/// Per-peak span-averaged strains for a solved shape.
inline std::vector<double> peak_average_strains(const PostBuckleSolution& sol,
                                                const GratingLayout& layout) {
    std::vector<double> out;
    out.reserve(layout.peaks.size());
    for (const auto& span : layout.peaks)
        out.push_back(average_strain(sol, span, layout.dy_fbg));
    return out;
}

} // namespace stiffbeam
