#pragma once

// One-dimensional Helmholtz model with perfectly matched layers, in semiclassical
// scaling (hbar = 1/k):
//
//   P_k u = -mu nu u - k^{-2} (alpha nu^{-1} u')',   nu = 1 + i sigma.
//
// Physical coefficients live in (-1, 1); sigma vanishes on [-1, 1].

#include <array>
#include <cmath>
#include <complex>
#include <functional>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>

#include "gcs/coherent_state.hpp"
#include "gcs/jet.hpp"

namespace gcs {

// ---------------------------------------------------------------------------
// Degree-7 bridge S with S(0) = 0, S(1) = 1 and S', S'', S''' vanishing at both ends.

inline constexpr std::array<double, 8> kBridgeCoefficients{0.0, 0.0, 0.0, 0.0, 35.0, -84.0, 70.0, -20.0};

inline double bridge_eval(double t, int order) {
    if (!(t >= 0.0 && t <= 1.0)) throw std::invalid_argument("bridge_eval: t outside [0, 1]");
    if (order < 0 || order > 3) throw std::invalid_argument("bridge_eval: order outside [0, 3]");
    return polynomial_jet(kBridgeCoefficients, 0.0, 1.0, t).derivative(order).real();
}

// ---------------------------------------------------------------------------

enum class Smoothness { C3PiecewisePolynomial, CInfinity };

/// Smooth complex coefficient of x exposing its Taylor jet.
class CoefficientModel {
public:
    using JetFn = std::function<Jet(double)>;

    CoefficientModel(JetFn jet, Smoothness smoothness) : jet_(std::move(jet)), smoothness_(smoothness) {}

    static CoefficientModel constant(complex v) {
        return {[v](double) { return Jet(v); }, Smoothness::CInfinity};
    }

    Jet jet(double x) const { return jet_(x); }
    complex value(double x) const { return jet_(x).value(); }
    complex derivative(double x, int order) const {
        if (order < 0 || order > Jet::kOrder) throw std::invalid_argument("CoefficientModel: derivative order");
        return jet_(x).derivative(order);
    }
    Smoothness smoothness() const { return smoothness_; }

    friend CoefficientModel operator*(const CoefficientModel& a, const CoefficientModel& b) {
        return {[a, b](double x) { return a.jet(x) * b.jet(x); }, combine(a, b)};
    }
    friend CoefficientModel operator/(const CoefficientModel& a, const CoefficientModel& b) {
        return {[a, b](double x) { return a.jet(x) / b.jet(x); }, combine(a, b)};
    }
    friend CoefficientModel operator+(const CoefficientModel& a, const CoefficientModel& b) {
        return {[a, b](double x) { return a.jet(x) + b.jet(x); }, combine(a, b)};
    }
    friend CoefficientModel operator-(const CoefficientModel& a, const CoefficientModel& b) {
        return {[a, b](double x) { return a.jet(x) - b.jet(x); }, combine(a, b)};
    }

private:
    static Smoothness combine(const CoefficientModel& a, const CoefficientModel& b) {
        return a.smoothness_ == Smoothness::CInfinity && b.smoothness_ == Smoothness::CInfinity
                   ? Smoothness::CInfinity
                   : Smoothness::C3PiecewisePolynomial;
    }

    JetFn jet_;
    Smoothness smoothness_;
};

namespace detail {

/// Even function equal to `inner` for |x| <= a, `outer` for |x| >= b, bridged on
/// [a, b] by inner + (outer - inner) * S((|x| - a)/(b - a)).
inline Jet even_plateau_jet(double x, double a, double b, double inner, double outer) {
    const double ax = std::abs(x);
    Jet j;
    if (ax <= a) {
        j = Jet(inner);
    } else if (ax >= b) {
        j = Jet(outer);
    } else {
        j = Jet(inner) + (outer - inner) * polynomial_jet(kBridgeCoefficients, a, 1.0 / (b - a), ax);
    }
    return x < 0.0 ? j.reflected() : j;
}

}  // namespace detail

/// PML damping sigma(x) = (1/10) [(x-1)^4 for x > 1, (-1-x)^4 for x < -1].
inline constexpr double kPmlStrength = 0.1;

inline CoefficientModel pml_sigma_model() {
    return {[](double x) {
                static constexpr std::array<double, 5> quartic{0.0, 0.0, 0.0, 0.0, kPmlStrength};
                if (x > 1.0) return polynomial_jet(quartic, 1.0, 1.0, x);
                if (x < -1.0) return polynomial_jet(quartic, -1.0, 1.0, x);
                return Jet(0.0);
            },
            Smoothness::C3PiecewisePolynomial};
}

inline double pml_sigma(double x, int order) {
    if (order < 0 || order > 2) throw std::invalid_argument("pml_sigma: order outside [0, 2]");
    return pml_sigma_model().derivative(x, order).real();
}

/// nu = 1 + i sigma.
inline CoefficientModel pml_nu_model() {
    const auto sigma = pml_sigma_model();
    return {[sigma](double x) { return Jet(1.0) + complex{0.0, 1.0} * sigma.jet(x); },
            Smoothness::C3PiecewisePolynomial};
}

/// Cutoff phi: 1 on [-1/2, 1/2], 0 outside (-3/4, 3/4), C^3 bridge in between.
inline CoefficientModel cutoff_phi_model() {
    return {[](double x) { return detail::even_plateau_jet(x, 0.5, 0.75, 1.0, 0.0); },
            Smoothness::C3PiecewisePolynomial};
}

/// Heterogeneous medium: 2 on [-0.7, 0.7], 1 outside (-0.8, 0.8).
inline CoefficientModel heterogeneous_mu_model() {
    return {[](double x) { return detail::even_plateau_jet(x, 0.7, 0.8, 2.0, 1.0); },
            Smoothness::C3PiecewisePolynomial};
}

// ---------------------------------------------------------------------------

enum class CaseKind { Homogeneous, Heterogeneous };

inline CaseKind parse_case_kind(std::string_view s) {
    if (s == "homogeneous") return CaseKind::Homogeneous;
    if (s == "heterogeneous") return CaseKind::Heterogeneous;
    throw std::invalid_argument("unknown case '" + std::string(s) + "' (expected homogeneous|heterogeneous)");
}

inline std::string to_string(CaseKind kind) {
    return kind == CaseKind::Homogeneous ? "homogeneous" : "heterogeneous";
}

struct ExactSolution {
    std::function<complex(double)> value;
    std::function<complex(double)> derivative;
};

/// Coefficients, source and (when known) exact solution of one experiment.
struct ProblemCase {
    CaseKind kind;
    double k;
    CoefficientModel mu;
    CoefficientModel alpha;
    CoefficientModel nu;
    std::function<complex(double)> rhs;
    std::optional<ExactSolution> exact;

    double hbar() const { return 1.0 / k; }
    /// alpha / nu, the coefficient of the second-order term.
    CoefficientModel stiffness() const { return alpha / nu; }
};

inline complex plane_wave(double k, double x) { return std::polar(1.0, k * x); }

/// u_k = phi e^{ikx} and u_k' = (phi' + i k phi) e^{ikx}.
inline std::pair<complex, complex> exact_solution_homogeneous(double x, double k) {
    const Jet phi = cutoff_phi_model().jet(x);
    const complex e = plane_wave(k, x);
    return {phi.value() * e, (phi.derivative(1) + complex{0.0, k} * phi.value()) * e};
}

inline ProblemCase make_case(CaseKind kind, double k) {
    if (!(k > 0.0)) throw std::invalid_argument("make_case: wavenumber must be positive");
    const auto one = CoefficientModel::constant(1.0);
    const auto nu = pml_nu_model();
    if (kind == CaseKind::Homogeneous) {
        const auto phi = cutoff_phi_model();
        auto rhs = [phi, k](double x) {
            const Jet j = phi.jet(x);
            return -(j.derivative(2) + complex{0.0, 2.0 * k} * j.derivative(1)) * plane_wave(k, x) / (k * k);
        };
        ExactSolution exact{[k](double x) { return exact_solution_homogeneous(x, k).first; },
                            [k](double x) { return exact_solution_homogeneous(x, k).second; }};
        return {kind, k, one, one, nu, rhs, exact};
    }
    const auto mu = heterogeneous_mu_model();
    auto rhs = [mu, k](double x) { return (mu.value(x) - 1.0) * plane_wave(k, x); };
    return {kind, k, mu, one, nu, rhs, std::nullopt};
}

/// P_k u at x given u, u', u'' there.
inline complex apply_P(complex u, complex du, complex d2u, double x, const ProblemCase& pc) {
    const Jet stiff = pc.stiffness().jet(x);
    const complex mu_nu = pc.mu.value(x) * pc.nu.value(x);
    return -mu_nu * u - (stiff.derivative(1) * du + stiff.value() * d2u) / (pc.k * pc.k);
}

/// Principal symbol alpha nu^{-1} xi^2 - mu nu.
inline complex symbol(double x, double xi, const ProblemCase& pc) {
    return pc.alpha.value(x) / pc.nu.value(x) * xi * xi - pc.mu.value(x) * pc.nu.value(x);
}

inline PhaseSymbol phase_symbol(const ProblemCase& pc) {
    return [pc](double x, double xi) { return symbol(x, xi, pc); };
}

/// P_k in the coefficient form -hbar^2 a d^2 - i hbar b d + c:
/// a = alpha/nu, b = -i hbar (alpha/nu)', c = -mu nu.
inline SecondOrderOperator helmholtz_operator(const ProblemCase& pc) {
    const auto stiff = pc.stiffness();
    const double h = pc.hbar();
    const auto mu_nu = pc.mu * pc.nu;
    return {[stiff](double x) { return stiff.jet(x); },
            [stiff, h](double x) { return complex{0.0, -h} * stiff.jet(x).differentiated(); },
            [mu_nu](double x) { return -mu_nu.jet(x); }};
}

inline complex rhs(double x, const ProblemCase& pc) { return pc.rhs(x); }

}  // namespace gcs
