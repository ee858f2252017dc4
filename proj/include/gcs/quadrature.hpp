#pragma once

// Composite Gauss-Legendre rules sized to the oscillation scale 2*pi/k.

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <span>
#include <stdexcept>
#include <vector>

#include "gcs/coherent_state.hpp"

namespace gcs {

struct Interval {
    double lo;
    double hi;

    double length() const { return hi - lo; }
    bool contains(const Interval& o) const { return lo <= o.lo && o.hi <= hi; }
    static Interval hull(const Interval& a, const Interval& b) { return {std::min(a.lo, b.lo), std::max(a.hi, b.hi)}; }
};

/// Nodes and weights of the n-point Gauss-Legendre rule on [-1, 1].
struct GaussLegendre {
    std::vector<double> nodes;
    std::vector<double> weights;
};

inline GaussLegendre gauss_legendre(int n) {
    if (n < 1) throw std::invalid_argument("gauss_legendre: need at least one node");
    GaussLegendre gl{std::vector<double>(static_cast<std::size_t>(n)), std::vector<double>(static_cast<std::size_t>(n))};
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int j = 2; j <= n; ++j) {
                const double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        gl.nodes[static_cast<std::size_t>(i)] = -x;
        gl.nodes[static_cast<std::size_t>(n - 1 - i)] = x;
        gl.weights[static_cast<std::size_t>(i)] = w;
        gl.weights[static_cast<std::size_t>(n - 1 - i)] = w;
    }
    if (n % 2 == 1) gl.nodes[static_cast<std::size_t>(n / 2)] = 0.0;
    return gl;
}

struct QuadratureRule {
    std::vector<double> nodes;
    std::vector<double> weights;
    Interval window;
    int panels = 0;
    int nodes_per_panel = 0;

    std::size_t size() const { return nodes.size(); }
};

/// Composite rule on equal panels.
inline QuadratureRule composite_rule(Interval window, int panels, int nodes_per_panel) {
    if (!(window.hi > window.lo)) throw std::invalid_argument("composite_rule: empty window");
    if (panels < 1) throw std::invalid_argument("composite_rule: need at least one panel");
    const auto gl = gauss_legendre(nodes_per_panel);
    QuadratureRule rule;
    rule.window = window;
    rule.panels = panels;
    rule.nodes_per_panel = nodes_per_panel;
    rule.nodes.reserve(static_cast<std::size_t>(panels * nodes_per_panel));
    rule.weights.reserve(rule.nodes.capacity());
    const double width = window.length() / panels;
    for (int p = 0; p < panels; ++p) {
        const double mid = window.lo + (p + 0.5) * width;
        for (int i = 0; i < nodes_per_panel; ++i) {
            rule.nodes.push_back(mid + 0.5 * width * gl.nodes[static_cast<std::size_t>(i)]);
            rule.weights.push_back(0.5 * width * gl.weights[static_cast<std::size_t>(i)]);
        }
    }
    return rule;
}

/// Rule for functions oscillating at wavenumber up to k: panels no wider than
/// half a wavelength and at least nodes_per_wavelength nodes per 2*pi/k.
inline QuadratureRule build_rule(Interval window, double k, int nodes_per_wavelength = 20, int nodes_per_panel = 10) {
    if (!(window.hi > window.lo)) throw std::invalid_argument("build_rule: empty window");
    if (!(k > 0.0)) throw std::invalid_argument("build_rule: wavenumber must be positive");
    if (nodes_per_wavelength < 10) throw std::invalid_argument("build_rule: need at least 10 nodes per wavelength");
    const double wavelength = 2.0 * std::numbers::pi / k;
    const double by_width = window.length() / (0.5 * wavelength);
    const double by_density = nodes_per_wavelength * window.length() / wavelength / nodes_per_panel;
    const int panels = std::max(1, static_cast<int>(std::ceil(std::max(by_width, by_density) - 1e-9)));
    return composite_rule(window, panels, nodes_per_panel);
}

/// sum_q w_q f(x_q) conj(g(x_q)).
template <typename F, typename G>
complex inner_product(F&& f, G&& g, const QuadratureRule& rule) {
    complex acc = 0.0;
    for (std::size_t q = 0; q < rule.size(); ++q) {
        const double x = rule.nodes[q];
        acc += rule.weights[q] * complex(f(x)) * std::conj(complex(g(x)));
    }
    return acc;
}

template <typename F>
double squared_norm(F&& f, const QuadratureRule& rule) {
    double acc = 0.0;
    for (std::size_t q = 0; q < rule.size(); ++q) acc += rule.weights[q] * std::norm(complex(f(rule.nodes[q])));
    return acc;
}

/// Half-width, in units of sqrt(hbar), outside which |psi|^2 carries e^{-c^2/2} <= tail_tol.
inline double tail_radius(double tail_tol) { return std::sqrt(-2.0 * std::log(tail_tol)); }

inline constexpr double kDefaultTailTol = 5.380186160021138e-32;  // e^{-72}

/// Smallest interval holding every center +- c sqrt(hbar) with e^{-c^2/2} = tail_tol.
inline Interval support_window(std::span<const CoherentState> states, double tail_tol = kDefaultTailTol) {
    if (states.empty()) throw std::invalid_argument("support_window: no states");
    const double c = tail_radius(tail_tol);
    Interval w{states.front().x0(), states.front().x0()};
    for (const auto& s : states) {
        const double r = c * std::sqrt(s.hbar());
        w.lo = std::min(w.lo, s.x0() - r);
        w.hi = std::max(w.hi, s.x0() + r);
    }
    return w;
}

}  // namespace gcs
