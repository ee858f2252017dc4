#pragma once

// Phase-space lattice and the finite index sets that span the discretization space.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <functional>
#include <numbers>
#include <ostream>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace gcs {

/// Square lattice of phase-space points with step sqrt(pi * hbar) in both x and xi.
class LatticeSpec {
public:
    explicit LatticeSpec(double hbar) : hbar_(hbar) {
        if (!(hbar > 0.0)) throw std::invalid_argument("LatticeSpec: hbar must be positive");
    }
    /// Lattice for wavenumber k with R = 1, i.e. hbar = 1/k.
    static LatticeSpec for_wavenumber(double k) { return LatticeSpec(1.0 / k); }

    double hbar() const { return hbar_; }
    double spacing() const { return std::sqrt(std::numbers::pi * hbar_); }

    friend bool operator==(const LatticeSpec&, const LatticeSpec&) = default;

private:
    double hbar_;
};

/// Position (or frequency) coordinate of lattice index m.
inline double lattice_point(long m, const LatticeSpec& spec) { return spec.spacing() * static_cast<double>(m); }

struct IndexPair {
    long m = 0;  ///< position index
    long n = 0;  ///< frequency index

    friend auto operator<=>(const IndexPair&, const IndexPair&) = default;
};

struct BallRule {
    double rho;
    int exponent;
};
struct SymbolRule {
    double delta;
};
struct PlaneWaveRhsRule {
    double epsilon;
    double support_lo;
    double support_hi;
};
using SelectionRule = std::variant<BallRule, SymbolRule, PlaneWaveRhsRule>;

/// Finite, duplicate-free, lexicographically ordered subset of Z^2 together with
/// the rule that produced it.
class IndexSet {
public:
    IndexSet(LatticeSpec lattice, SelectionRule rule, std::vector<IndexPair> members)
        : lattice_(lattice), rule_(rule), members_(std::move(members)) {
        std::sort(members_.begin(), members_.end());
        members_.erase(std::unique(members_.begin(), members_.end()), members_.end());
    }

    const LatticeSpec& lattice() const { return lattice_; }
    const SelectionRule& rule() const { return rule_; }
    const std::vector<IndexPair>& members() const { return members_; }
    std::size_t size() const { return members_.size(); }
    bool empty() const { return members_.empty(); }
    bool contains(IndexPair p) const { return std::binary_search(members_.begin(), members_.end(), p); }

    double x(std::size_t j) const { return lattice_point(members_[j].m, lattice_); }
    double xi(std::size_t j) const { return lattice_point(members_[j].n, lattice_); }

    /// Largest |xi| among members (0 for an empty set).
    double max_abs_xi() const {
        double r = 0.0;
        for (std::size_t j = 0; j < size(); ++j) r = std::max(r, std::abs(xi(j)));
        return r;
    }

private:
    LatticeSpec lattice_;
    SelectionRule rule_;
    std::vector<IndexPair> members_;
};

using PhaseSymbol = std::function<std::complex<double>(double x, double xi)>;

/// All pairs with m^2 + n^2 <= rho * (1/hbar)^exponent.
inline IndexSet build_ball_set(const LatticeSpec& spec, double rho, int exponent) {
    if (!(rho > 0.0)) throw std::invalid_argument("build_ball_set: rho must be positive");
    if (exponent < 0) throw std::invalid_argument("build_ball_set: exponent must be non-negative");
    const double radius2 = rho * std::pow(1.0 / spec.hbar(), exponent);
    const long r = static_cast<long>(std::floor(std::sqrt(radius2))) + 1;
    std::vector<IndexPair> members;
    for (long m = -r; m <= r; ++m)
        for (long n = -r; n <= r; ++n)
            if (static_cast<double>(m * m + n * n) <= radius2) members.push_back({m, n});
    return IndexSet(spec, BallRule{rho, exponent}, std::move(members));
}

struct SearchBounds {
    long m_max;
    long n_max;
};

namespace detail {

inline bool shell_clear(const LatticeSpec& spec, const PhaseSymbol& symbol, double level, long fixed, long extent,
                        bool fixed_is_m) {
    for (long s : {-fixed, fixed})
        for (long t = -extent; t <= extent; ++t) {
            const long m = fixed_is_m ? s : t;
            const long n = fixed_is_m ? t : s;
            if (std::abs(symbol(lattice_point(m, spec), lattice_point(n, spec))) < level) return false;
        }
    return true;
}

}  // namespace detail

/// Box half-widths enclosing the sublevel set {|p| < delta}.
///
/// Starts from a box covering [-1,1]^2 and doubles each half-width until both
/// pairs of box edges satisfy |p| >= delta + margin. A negative margin selects
/// the default 0.1 * delta.
inline SearchBounds search_bounds_from_symbol(const LatticeSpec& spec, const PhaseSymbol& symbol, double delta,
                                              double margin = -1.0, int max_doublings = 24) {
    if (!(delta > 0.0)) throw std::invalid_argument("search_bounds_from_symbol: delta must be positive");
    if (margin < 0.0) margin = 0.1 * delta;
    const double level = delta + margin;
    const long start = std::max(2L, static_cast<long>(std::ceil(1.0 / spec.spacing())) + 1);
    long m_max = start;
    long n_max = start;
    for (int it = 0; it <= max_doublings; ++it) {
        const bool m_ok = detail::shell_clear(spec, symbol, level, m_max, n_max, true);
        const bool n_ok = detail::shell_clear(spec, symbol, level, n_max, m_max, false);
        if (m_ok && n_ok) return {m_max, n_max};
        if (!m_ok) m_max *= 2;
        if (!n_ok) n_max *= 2;
    }
    throw std::runtime_error("search_bounds_from_symbol: no bounded energy layer found (symbol not coercive?)");
}

/// All pairs inside the search box with |symbol(x^m, xi^n)| < delta.
inline IndexSet build_symbol_set(const LatticeSpec& spec, const PhaseSymbol& symbol, double delta, SearchBounds bounds) {
    if (!(delta > 0.0)) throw std::invalid_argument("build_symbol_set: delta must be positive");
    std::vector<IndexPair> members;
    for (long m = -bounds.m_max; m <= bounds.m_max; ++m) {
        const double x = lattice_point(m, spec);
        for (long n = -bounds.n_max; n <= bounds.n_max; ++n) {
            if (std::abs(symbol(x, lattice_point(n, spec))) < delta) {
                if (std::abs(m) == bounds.m_max || std::abs(n) == bounds.n_max)
                    throw std::runtime_error("build_symbol_set: selected pair (" + std::to_string(m) + "," +
                                             std::to_string(n) + ") touches the search box boundary");
                members.push_back({m, n});
            }
        }
    }
    return IndexSet(spec, SymbolRule{delta}, std::move(members));
}

inline IndexSet build_symbol_set(const LatticeSpec& spec, const PhaseSymbol& symbol, double delta) {
    return build_symbol_set(spec, symbol, delta, search_bounds_from_symbol(spec, symbol, delta));
}

/// Pairs whose position lies within hbar^(1/2 - epsilon) of [lo, hi] and whose
/// frequency satisfies ||xi| - 1| <= hbar^(1/2 - epsilon).
inline IndexSet build_planewave_rhs_set(const LatticeSpec& spec, double lo, double hi, double epsilon) {
    if (!(hi > lo)) throw std::invalid_argument("build_planewave_rhs_set: support interval is empty");
    if (!(epsilon > 0.0 && epsilon < 0.5))
        throw std::invalid_argument("build_planewave_rhs_set: epsilon must lie in (0, 1/2)");
    const double tol = std::pow(spec.hbar(), 0.5 - epsilon);
    const double h = spec.spacing();
    const long m_lo = static_cast<long>(std::floor((lo - tol) / h)) - 1;
    const long m_hi = static_cast<long>(std::ceil((hi + tol) / h)) + 1;
    const long n_abs = static_cast<long>(std::ceil((1.0 + tol) / h)) + 1;
    std::vector<IndexPair> members;
    for (long m = m_lo; m <= m_hi; ++m) {
        const double x = lattice_point(m, spec);
        const double dist = x < lo ? lo - x : (x > hi ? x - hi : 0.0);
        if (dist > tol) continue;
        for (long n = -n_abs; n <= n_abs; ++n)
            if (std::abs(std::abs(lattice_point(n, spec)) - 1.0) <= tol) members.push_back({m, n});
    }
    return IndexSet(spec, PlaneWaveRhsRule{epsilon, lo, hi}, std::move(members));
}

/// CSV rows "m,n,x,xi,|p|" for phase-space plots.
inline void write_index_set_csv(std::ostream& out, const IndexSet& set, const PhaseSymbol& symbol) {
    out << "m,n,x,xi,|p|\n";
    char buf[160];
    for (std::size_t j = 0; j < set.size(); ++j) {
        const auto [m, n] = set.members()[j];
        const double x = set.x(j);
        const double xi = set.xi(j);
        std::snprintf(buf, sizeof buf, "%ld,%ld,%.12g,%.12g,%.6e\n", m, n, x, xi, std::abs(symbol(x, xi)));
        out << buf;
    }
}

}  // namespace gcs
