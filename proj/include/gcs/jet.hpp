#pragma once

#include <array>
#include <complex>
#include <cstddef>

namespace gcs {

using complex = std::complex<double>;

/// Truncated Taylor expansion of a complex function of one real variable.
///
/// Stores c[j] = f^{(j)}(x) / j! for j = 0..kOrder. Arithmetic follows the
/// usual truncated power-series rules, so derivatives of products, quotients
/// and compositions with polynomials come out exact (no finite differences).
class Jet {
public:
    static constexpr int kOrder = 8;

    Jet() { c_.fill(complex{}); }
    Jet(complex value) : Jet() { c_[0] = value; }  // NOLINT(google-explicit-constructor)
    Jet(double value) : Jet(complex{value, 0.0}) {}  // NOLINT(google-explicit-constructor)

    /// Jet of the identity map t -> t expanded at x.
    static Jet variable(double x) {
        Jet j{x};
        j.c_[1] = 1.0;
        return j;
    }

    complex coefficient(int j) const { return c_[static_cast<std::size_t>(j)]; }
    void set_coefficient(int j, complex v) { c_[static_cast<std::size_t>(j)] = v; }

    complex value() const { return c_[0]; }

    /// d^order f / dx^order at the expansion point.
    complex derivative(int order) const {
        double fact = 1.0;
        for (int i = 2; i <= order; ++i) fact *= i;
        return c_[static_cast<std::size_t>(order)] * fact;
    }

    /// Jet of f'. The top coefficient is unknown after differentiation and set to zero.
    Jet differentiated() const {
        Jet d;
        for (int j = 0; j < kOrder; ++j) d.c_[j] = c_[j + 1] * static_cast<double>(j + 1);
        return d;
    }

    /// Jet of x -> f(-x) from the jet of f at -x.
    Jet reflected() const {
        Jet r = *this;
        for (int j = 1; j <= kOrder; j += 2) r.c_[j] = -r.c_[j];
        return r;
    }

    Jet& operator+=(const Jet& o) {
        for (int j = 0; j <= kOrder; ++j) c_[j] += o.c_[j];
        return *this;
    }
    Jet& operator-=(const Jet& o) {
        for (int j = 0; j <= kOrder; ++j) c_[j] -= o.c_[j];
        return *this;
    }
    Jet& operator*=(complex s) {
        for (auto& v : c_) v *= s;
        return *this;
    }

    friend Jet operator+(Jet a, const Jet& b) { return a += b; }
    friend Jet operator-(Jet a, const Jet& b) { return a -= b; }
    friend Jet operator-(Jet a) {
        for (auto& v : a.c_) v = -v;
        return a;
    }
    friend Jet operator*(Jet a, complex s) { return a *= s; }
    friend Jet operator*(complex s, Jet a) { return a *= s; }
    friend Jet operator*(Jet a, double s) { return a *= complex{s, 0.0}; }
    friend Jet operator*(double s, Jet a) { return a *= complex{s, 0.0}; }

    friend Jet operator*(const Jet& a, const Jet& b) {
        Jet r;
        for (int i = 0; i <= kOrder; ++i) {
            if (a.c_[i] == complex{}) continue;
            for (int j = 0; i + j <= kOrder; ++j) r.c_[i + j] += a.c_[i] * b.c_[j];
        }
        return r;
    }

    /// Series division; requires b.value() != 0.
    friend Jet operator/(const Jet& a, const Jet& b) {
        Jet q;
        const complex inv = 1.0 / b.c_[0];
        for (int n = 0; n <= kOrder; ++n) {
            complex s = a.c_[n];
            for (int j = 1; j <= n; ++j) s -= b.c_[j] * q.c_[n - j];
            q.c_[n] = s * inv;
        }
        return q;
    }

private:
    std::array<complex, kOrder + 1> c_;
};

/// Taylor jet at x of the real polynomial sum_i coeffs[i] * t^i composed with
/// the affine map t = (x - origin) * scale.
template <std::size_t N>
Jet polynomial_jet(const std::array<double, N>& coeffs, double origin, double scale, double x) {
    // Taylor shift by repeated synthetic division: coefficients of p(t0 + s).
    std::array<double, N> shifted = coeffs;
    const double t0 = (x - origin) * scale;
    for (std::size_t i = 0; i < N; ++i)
        for (std::size_t j = N - 1; j > i; --j) shifted[j - 1] += t0 * shifted[j];
    Jet jet;
    double factor = 1.0;
    for (int j = 0; j <= Jet::kOrder && static_cast<std::size_t>(j) < N; ++j) {
        jet.set_coefficient(j, shifted[static_cast<std::size_t>(j)] * factor);
        factor *= scale;
    }
    return jet;
}

}  // namespace gcs
