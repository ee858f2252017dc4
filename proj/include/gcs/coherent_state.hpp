#pragma once

// Gaussian coherent states and their exact calculus.
//
// Convention: psi(x) = (pi*hbar)^(-1/4) exp(-(x-x0)^2/(2 hbar)) exp(+i xi0 (x-x0)/hbar),
// unit L2 norm. Derivatives are d^a psi = hbar^(-a/2) q_a(z) psi with
// z = hbar^(-1/2) (x - x0 - i xi0) and q_{a+1}(z) = q_a'(z) - z q_a(z).
// Operators are written P = -hbar^2 a(x) d^2 - i hbar b(x) d + c(x), whose
// symbol is p(x, xi) = a(x) xi^2 + b(x) xi + c(x).

#include <array>
#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "gcs/jet.hpp"
#include "gcs/phase_space.hpp"

namespace gcs {

class CoherentState {
public:
    CoherentState(double hbar, double x0, double xi0) : hbar_(hbar), x0_(x0), xi0_(xi0) {
        if (!(hbar > 0.0)) throw std::invalid_argument("CoherentState: hbar must be positive");
    }
    /// State attached to lattice index (m, n).
    static CoherentState at(const LatticeSpec& spec, IndexPair p) {
        return {spec.hbar(), lattice_point(p.m, spec), lattice_point(p.n, spec)};
    }

    double hbar() const { return hbar_; }
    double x0() const { return x0_; }
    double xi0() const { return xi0_; }

    double amplitude() const { return std::pow(std::numbers::pi * hbar_, -0.25); }

    friend bool operator==(const CoherentState&, const CoherentState&) = default;

private:
    double hbar_;
    double x0_;
    double xi0_;
};

inline complex eval_state(const CoherentState& s, double x) {
    const double y = x - s.x0();
    const double mod = s.amplitude() * std::exp(-y * y / (2.0 * s.hbar()));
    const double phase = s.xi0() * y / s.hbar();
    return {mod * std::cos(phase), mod * std::sin(phase)};
}

/// Polynomial q_a with d^a psi = hbar^(-a/2) q_a(z) psi.
class DerivativePolynomial {
public:
    static constexpr int kMaxOrder = 4;

    explicit DerivativePolynomial(int order) : order_(order) {
        if (order < 0 || order > kMaxOrder)
            throw std::invalid_argument("DerivativePolynomial: order outside [0, 4]");
        coeffs_.fill(0.0);
        coeffs_[0] = 1.0;
        for (int a = 0; a < order; ++a) {
            std::array<double, kMaxOrder + 2> next{};
            for (int i = 1; i <= a; ++i) next[i - 1] += i * coeffs_[i];   // q'
            for (int i = 0; i <= a; ++i) next[i + 1] -= coeffs_[i];       // -z q
            coeffs_ = next;
        }
    }

    int order() const { return order_; }
    /// Coefficient of z^i (real integers, stored as double).
    double coefficient(int i) const { return coeffs_[static_cast<std::size_t>(i)]; }
    int degree() const {
        for (int i = kMaxOrder + 1; i > 0; --i)
            if (coeffs_[static_cast<std::size_t>(i)] != 0.0) return i;
        return 0;
    }

    complex operator()(complex z) const {
        complex r = 0.0;
        for (int i = kMaxOrder + 1; i >= 0; --i) r = r * z + coeffs_[static_cast<std::size_t>(i)];
        return r;
    }

private:
    int order_;
    std::array<double, kMaxOrder + 2> coeffs_{};
};

inline const DerivativePolynomial& derivative_polynomial(int order) {
    static const std::array<DerivativePolynomial, DerivativePolynomial::kMaxOrder + 1> table{
        DerivativePolynomial(0), DerivativePolynomial(1), DerivativePolynomial(2), DerivativePolynomial(3),
        DerivativePolynomial(4)};
    if (order < 0 || order > DerivativePolynomial::kMaxOrder)
        throw std::invalid_argument("eval_derivative: order outside [0, 4]");
    return table[static_cast<std::size_t>(order)];
}

inline complex scaled_variable(const CoherentState& s, double x) {
    return complex{x - s.x0(), -s.xi0()} / std::sqrt(s.hbar());
}

inline complex eval_derivative(const CoherentState& s, int order, double x) {
    const auto& q = derivative_polynomial(order);
    return std::pow(s.hbar(), -0.5 * order) * q(scaled_variable(s, x)) * eval_state(s, x);
}

/// Closed-form L2 inner product (s1, s2) = int s1 conj(s2).
inline complex overlap(const CoherentState& s1, const CoherentState& s2) {
    if (s1.hbar() != s2.hbar()) throw std::invalid_argument("overlap: states have different hbar");
    const double h = s1.hbar();
    const double d = s1.x0() - s2.x0();
    const double s = s1.xi0() - s2.xi0();
    const double mean_xi = 0.5 * (s1.xi0() + s2.xi0());
    return std::polar(std::exp(-(d * d + s * s) / (4.0 * h)), -mean_xi * d / h);
}

/// Moments int (x - x1)^j s1(x) conj(s2(x)) dx for j = 0..max_power.
///
/// The product of two states is overlap(s1,s2) times a normalized Gaussian
/// with complex mean (x1+x2)/2 + i (xi1-xi2)/2 and variance hbar/2.
inline std::vector<complex> moment_overlaps(const CoherentState& s1, const CoherentState& s2, int max_power) {
    const complex ov = overlap(s1, s2);
    const double var = 0.5 * s1.hbar();
    const complex shift{0.5 * (s2.x0() - s1.x0()), 0.5 * (s1.xi0() - s2.xi0())};
    // central moments E[u^i]
    std::vector<double> central(static_cast<std::size_t>(max_power) + 1, 0.0);
    central[0] = 1.0;
    for (int i = 2; i <= max_power; i += 2) central[i] = central[i - 2] * (i - 1) * var;
    std::vector<complex> out(static_cast<std::size_t>(max_power) + 1);
    for (int j = 0; j <= max_power; ++j) {
        complex acc = 0.0;
        double binom = 1.0;
        for (int i = 0; i <= j; ++i) {
            if (i % 2 == 0) acc += binom * std::pow(shift, j - i) * central[i];
            binom = binom * (j - i) / (i + 1);
        }
        out[j] = ov * acc;
    }
    return out;
}

/// Coefficients of P = -hbar^2 a d^2 - i hbar b d + c, each given as a Taylor jet.
struct SecondOrderOperator {
    std::function<Jet(double)> a;
    std::function<Jet(double)> b;
    std::function<Jet(double)> c;

    complex symbol(double x, double xi) const {
        return a(x).value() * xi * xi + b(x).value() * xi + c(x).value();
    }
};

inline SecondOrderOperator constant_operator(complex a, complex b, complex c) {
    return {[a](double) { return Jet(a); }, [b](double) { return Jet(b); }, [c](double) { return Jet(c); }};
}

/// Multiplier g with (P psi)(x) = g(x) psi(x), from pointwise coefficient values.
inline complex operator_multiplier(const CoherentState& s, complex a, complex b, complex c, double x) {
    const double h = s.hbar();
    const complex w = complex{-(x - s.x0()), s.xi0()} / h;  // psi'/psi
    return -h * h * a * (w * w - 1.0 / h) - complex{0.0, h} * b * w + c;
}

inline complex operator_multiplier(const CoherentState& s, const SecondOrderOperator& op, double x) {
    return operator_multiplier(s, op.a(x).value(), op.b(x).value(), op.c(x).value(), x);
}

/// (P psi)(x) through the stored derivative polynomials.
inline complex apply_operator(const CoherentState& s, const SecondOrderOperator& op, double x) {
    const double h = s.hbar();
    return -h * h * op.a(x).value() * eval_derivative(s, 2, x) -
           complex{0.0, h} * op.b(x).value() * eval_derivative(s, 1, x) + op.c(x).value() * eval_state(s, x);
}

/// r(x) = g(x) - p(x0, xi0), so that (P - p(x0,xi0)) psi = r psi.
inline complex residual_factor(const CoherentState& s, const SecondOrderOperator& op, double x) {
    return operator_multiplier(s, op, x) - op.symbol(s.x0(), s.xi0());
}

/// Taylor jet at x of r_L with (P - p(x0,xi0))^L psi = r_L psi.
///
/// Uses r_{L+1} = -hbar^2 a (r'' + 2 r' w + r (w' + w^2)) - i hbar b (r' + r w) + (c - p) r
/// with w = psi'/psi. Each step consumes two orders of the jet.
inline Jet residual_jet(const CoherentState& s, const SecondOrderOperator& op, int power, double x) {
    if (power < 0 || 2 * power > Jet::kOrder + 2)
        throw std::invalid_argument("residual_jet: power out of range");
    const double h = s.hbar();
    Jet w{complex{-(x - s.x0()), s.xi0()} / h};
    w.set_coefficient(1, -1.0 / h);
    const Jet dw{-1.0 / h};
    const complex p0 = op.symbol(s.x0(), s.xi0());
    const Jet a = op.a(x);
    const Jet b = op.b(x);
    const Jet cp = op.c(x) - Jet(p0);
    Jet r{1.0};
    for (int l = 0; l < power; ++l) {
        const Jet r1 = r.differentiated();
        const Jet r2 = r1.differentiated();
        r = (-h * h) * (a * (r2 + 2.0 * (r1 * w) + r * (dw + w * w))) - complex{0.0, h} * (b * (r1 + r * w)) +
            cp * r;
    }
    return r;
}

}  // namespace gcs
