#pragma once

// Norms of (P - p(x0, xi0))^L psi and the constant-coefficient operator overlap.

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "gcs/coherent_state.hpp"
#include "gcs/quadrature.hpp"

namespace gcs {

/// || (P - p(x0, xi0))^L psi ||_{L2} for L in 1..3, by composite quadrature over
/// x0 +- 12 sqrt(hbar) with 40 nodes per period of the state's oscillation.
inline double iterated_residual_norm(const CoherentState& s, const SecondOrderOperator& op, int L) {
    if (L < 1 || L > 3) throw std::invalid_argument("iterated_residual_norm: L outside [1, 3]");
    const double r = tail_radius(kDefaultTailTol) * std::sqrt(s.hbar());
    const Interval window{s.x0() - r, s.x0() + r};
    const double k_eff = std::max(1.0, std::abs(s.xi0())) / s.hbar();
    const auto rule = build_rule(window, k_eff, 40, 12);
    return std::sqrt(squared_norm(
        [&](double x) { return residual_jet(s, op, L, x).value() * eval_state(s, x); }, rule));
}

/// (P psi1, psi2) for constant coefficients, in closed form from Gaussian moments.
inline complex operator_overlap(const CoherentState& s1, const CoherentState& s2, complex a, complex b, complex c) {
    const auto mom = moment_overlaps(s1, s2, 2);
    const double h = s1.hbar();
    const double xi = s1.xi0();
    const complex p0 = a * xi * xi + b * xi + c;
    // P psi1 = (p0 + a hbar + i (2 a xi + b) y - a y^2) psi1, y = x - x1
    return (p0 + a * h) * mom[0] + complex{0.0, 1.0} * (2.0 * a * xi + b) * mom[1] - a * mom[2];
}

}  // namespace gcs
