#pragma once

#include <cmath>
#include <numbers>

#include "stiffbeam/errors.hpp"

namespace stiffbeam {

// Smallest positive root of tan(mu) = mu and its square, the classical
// fixed-pinned critical load factor: P_cr = mu^2 * EI / L^2.
inline constexpr double kFixedPinnedMu = 4.493409457909064;
inline constexpr double kFixedPinnedLoadFactor = 20.19072855642663;

/// Geometry of the composite section: a single fiber resting on a coplanar
/// row of wires. Vertical positions are measured from the wire-row center
/// plane; the fiber center sits at r_wire + r_fbg above it.
struct SectionGeometry {
    double r_fbg;   // m
    double r_wire;  // m
    int n_wires = 4;
    double E_fbg;   // Pa
    double E_wire;  // Pa
};

struct SectionOffsets {
    double dy_na;    // fiber center to combined neutral axis, m
    double dy_wire;  // wire-row center to combined neutral axis, m
    double dy_fbg;   // fiber center-line offset used for strain, m
};

/// Full beam description with derived section properties.
struct BeamSpec {
    double r_fbg;
    double r_wire;
    int n_wires = 4;
    double E_fbg;
    double E_wire;
    double length;   // arc-length L, m

    // derived
    double dy_na = 0.0;
    double dy_wire = 0.0;
    double dy_fbg = 0.0;
    double EI = 0.0;  // N m^2
};

inline void validate_geometry(const SectionGeometry& g) {
    if (!(g.r_fbg > 0.0) || !(g.r_wire > 0.0))
        throw InvalidInput("cross_section: radii must be strictly positive");
    if (!(g.E_fbg >= 0.0) || !(g.E_wire >= 0.0))
        throw InvalidInput("cross_section: moduli must be non-negative");
    if (g.n_wires < 1)
        throw InvalidInput("cross_section: n_wires must be >= 1");
    if (g.E_fbg == 0.0 && g.E_wire == 0.0)
        throw InvalidInput("cross_section: at least one constituent must carry stiffness");
}

/// Modulus-weighted centroid of the composite section (transformed-section
/// method): y_na = sum(E_i A_i y_i) / sum(E_i A_i).
inline SectionOffsets neutral_axis(const SectionGeometry& g) {
    validate_geometry(g);
    const double A_fbg = std::numbers::pi * g.r_fbg * g.r_fbg;
    const double A_wire = std::numbers::pi * g.r_wire * g.r_wire;
    const double y_fiber = g.r_wire + g.r_fbg;  // tangent stacking

    const double ea_fbg = g.E_fbg * A_fbg;
    const double ea_wires = static_cast<double>(g.n_wires) * g.E_wire * A_wire;
    const double y_na = ea_fbg * y_fiber / (ea_fbg + ea_wires);

    SectionOffsets off;
    off.dy_na = y_fiber - y_na;
    off.dy_wire = -y_na;
    off.dy_fbg = off.dy_na;
    return off;
}

/// EI = E_fbg I_fbg + E_wire I_wire with
///   I_fbg  = pi r_fbg^2 (r_fbg^2/4 + dy_na^2)
///   I_wire = pi r_wire^2 (r_wire^2 + 4 dy_wire^2)
/// I_wire aggregates the whole wire row; for n_wires = 4 the general
/// per-wire sum collapses to the second expression.
inline double flexural_rigidity(const BeamSpec& b) {
    if (!(b.r_fbg > 0.0) || !(b.r_wire > 0.0))
        throw InvalidInput("flexural_rigidity: radii must be strictly positive");
    const double I_fbg = std::numbers::pi * b.r_fbg * b.r_fbg *
                         (b.r_fbg * b.r_fbg / 4.0 + b.dy_na * b.dy_na);
    const double I_wire = static_cast<double>(b.n_wires) * std::numbers::pi *
                          b.r_wire * b.r_wire *
                          (b.r_wire * b.r_wire / 4.0 + b.dy_wire * b.dy_wire);
    return b.E_fbg * I_fbg + b.E_wire * I_wire;
}

/// Build a BeamSpec with derived offsets and rigidity filled in.
inline BeamSpec make_beam_spec(double r_fbg, double r_wire, double E_fbg,
                               double E_wire, double length, int n_wires = 4) {
    if (!(length > 0.0))
        throw InvalidInput("make_beam_spec: length must be strictly positive");
    SectionGeometry g{r_fbg, r_wire, n_wires, E_fbg, E_wire};
    const SectionOffsets off = neutral_axis(g);

    BeamSpec b;
    b.r_fbg = r_fbg;
    b.r_wire = r_wire;
    b.n_wires = n_wires;
    b.E_fbg = E_fbg;
    b.E_wire = E_wire;
    b.length = length;
    b.dy_na = off.dy_na;
    b.dy_wire = off.dy_wire;
    b.dy_fbg = off.dy_fbg;
    b.EI = flexural_rigidity(b);
    return b;
}

/// Classical fixed-pinned critical load for this beam.
inline double critical_load(const BeamSpec& b) {
    return kFixedPinnedLoadFactor * b.EI / (b.length * b.length);
}

} // namespace stiffbeam
