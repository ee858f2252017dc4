#pragma once

// Least-squares discretization: minimize || P_k u - f ||_{L2} over the span of
// the selected coherent states, sampled by a composite quadrature rule.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>
#include <vector>

#include "gcs/coherent_state.hpp"
#include "gcs/phase_space.hpp"
#include "gcs/problem.hpp"
#include "gcs/quadrature.hpp"

namespace gcs {

inline std::vector<CoherentState> states_of(const IndexSet& set) {
    std::vector<CoherentState> out;
    out.reserve(set.size());
    for (const auto& p : set.members()) out.push_back(CoherentState::at(set.lattice(), p));
    return out;
}

/// Hull of the states' e^{-72} windows and the physical region [-1, 1].
inline Interval assembly_window(const IndexSet& set) {
    const auto states = states_of(set);
    return Interval::hull(support_window(states), Interval{-1.0, 1.0});
}

/// Quadrature keyed to the fastest oscillation present, k * max(1, max |xi|).
inline QuadratureRule assembly_rule(const IndexSet& set, double k, int nodes_per_wavelength = 20) {
    return build_rule(assembly_window(set), k * std::max(1.0, set.max_abs_xi()), nodes_per_wavelength);
}

struct DesignSystem {
    Eigen::MatrixXcd matrix;  ///< (q, j) = sqrt(w_q) (P_k psi_j)(x_q)
    Eigen::VectorXcd rhs;     ///< q = sqrt(w_q) f(x_q)
    IndexSet columns;
    QuadratureRule rule;
};

inline DesignSystem assemble(const IndexSet& set, const ProblemCase& pc, const QuadratureRule& rule) {
    if (set.empty()) throw std::invalid_argument("assemble: empty index set");
    if (std::abs(set.lattice().hbar() - pc.hbar()) > 1e-14 * pc.hbar())
        throw std::invalid_argument("assemble: lattice hbar does not match 1/k");
    const Interval need = assembly_window(set);
    if (!rule.window.contains(need)) {
        char msg[200];
        std::snprintf(msg, sizeof msg, "assemble: quadrature window [%g, %g] does not cover [%g, %g]", rule.window.lo,
                      rule.window.hi, need.lo, need.hi);
        throw std::invalid_argument(msg);
    }
    const auto Q = static_cast<Eigen::Index>(rule.size());
    const auto N = static_cast<Eigen::Index>(set.size());
    if (Q < N) throw std::invalid_argument("assemble: fewer quadrature nodes than basis functions");

    const auto op = helmholtz_operator(pc);
    std::vector<complex> a(rule.size()), b(rule.size()), c(rule.size());
    std::vector<double> sw(rule.size());
    Eigen::VectorXcd rhs(Q);
    for (std::size_t q = 0; q < rule.size(); ++q) {
        const double x = rule.nodes[q];
        a[q] = op.a(x).value();
        b[q] = op.b(x).value();
        c[q] = op.c(x).value();
        sw[q] = std::sqrt(rule.weights[q]);
        rhs(static_cast<Eigen::Index>(q)) = sw[q] * pc.rhs(x);
    }

    Eigen::MatrixXcd A = Eigen::MatrixXcd::Zero(Q, N);
    const double reach = tail_radius(kDefaultTailTol) * std::sqrt(pc.hbar());
    const auto states = states_of(set);
    for (Eigen::Index j = 0; j < N; ++j) {
        const auto& s = states[static_cast<std::size_t>(j)];
        const auto lo = std::lower_bound(rule.nodes.begin(), rule.nodes.end(), s.x0() - reach) - rule.nodes.begin();
        const auto hi = std::upper_bound(rule.nodes.begin(), rule.nodes.end(), s.x0() + reach) - rule.nodes.begin();
        for (auto q = lo; q < hi; ++q) {
            const auto uq = static_cast<std::size_t>(q);
            const double x = rule.nodes[uq];
            A(q, j) = sw[uq] * operator_multiplier(s, a[uq], b[uq], c[uq], x) * eval_state(s, x);
        }
    }
    return {std::move(A), std::move(rhs), set, rule};
}

struct SolveReport {
    Eigen::VectorXcd coefficients;
    Eigen::Index numerical_rank = 0;
    double truncation_cutoff = 0.0;  ///< absolute threshold cutoff_rel * sigma_max
    double cutoff_rel = 0.0;
    double residual_norm = 0.0;      ///< || P_k u - f ||_{L2} in the quadrature norm
    double rhs_norm = 0.0;
    std::vector<double> singular_values;
};

/// Minimum-norm truncated least-squares solution: Householder QR of the design
/// matrix, then SVD of the triangular factor.
inline SolveReport solve(const DesignSystem& sys, double cutoff_rel = 1e-12) {
    if (!(cutoff_rel > 0.0 && cutoff_rel < 1.0)) throw std::invalid_argument("solve: cutoff_rel must lie in (0, 1)");
    const auto& A = sys.matrix;
    const Eigen::Index N = A.cols();
    if (A.rows() < N) throw std::invalid_argument("solve: underdetermined design matrix");
    if (A.cwiseAbs().maxCoeff() == 0.0) throw std::runtime_error("solve: design matrix is identically zero");

    Eigen::HouseholderQR<Eigen::MatrixXcd> qr(A);
    const Eigen::MatrixXcd R = qr.matrixQR().topRows(N).triangularView<Eigen::Upper>();
    const Eigen::VectorXcd y = (qr.householderQ().adjoint() * sys.rhs).head(N);

    Eigen::BDCSVD<Eigen::MatrixXcd> svd(R, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& sigma = svd.singularValues();
    SolveReport rep;
    rep.cutoff_rel = cutoff_rel;
    rep.truncation_cutoff = cutoff_rel * sigma(0);
    Eigen::VectorXcd uy = svd.matrixU().adjoint() * y;
    for (Eigen::Index i = 0; i < N; ++i) {
        if (sigma(i) >= rep.truncation_cutoff && sigma(i) > 0.0) {
            uy(i) /= sigma(i);
            ++rep.numerical_rank;
        } else {
            uy(i) = 0.0;
        }
    }
    rep.coefficients = svd.matrixV() * uy;
    rep.residual_norm = (A * rep.coefficients - sys.rhs).norm();
    rep.rhs_norm = sys.rhs.norm();
    rep.singular_values.assign(sigma.data(), sigma.data() + sigma.size());
    return rep;
}

/// sum_j c_j d^order psi_j(x).
inline complex reconstruct(const Eigen::VectorXcd& coefficients, const IndexSet& set, double x, int derivative_order) {
    if (derivative_order < 0 || derivative_order > 1) throw std::invalid_argument("reconstruct: order outside [0, 1]");
    if (coefficients.size() != static_cast<Eigen::Index>(set.size()))
        throw std::invalid_argument("reconstruct: coefficient count does not match index set");
    complex acc = 0.0;
    for (std::size_t j = 0; j < set.size(); ++j) {
        const complex cj = coefficients(static_cast<Eigen::Index>(j));
        if (cj == complex{}) continue;
        acc += cj * eval_derivative(CoherentState::at(set.lattice(), set.members()[j]), derivative_order, x);
    }
    return acc;
}

inline complex reconstruct(const SolveReport& rep, const IndexSet& set, double x, int derivative_order) {
    return reconstruct(rep.coefficients, set, x, derivative_order);
}

/// Expansion sum_j c_j psi_j with a tail cut for fast pointwise evaluation.
class Expansion {
public:
    Expansion(const Eigen::VectorXcd& coefficients, const IndexSet& set) : states_(states_of(set)) {
        if (coefficients.size() != static_cast<Eigen::Index>(set.size()))
            throw std::invalid_argument("Expansion: coefficient count does not match index set");
        coeffs_.assign(coefficients.data(), coefficients.data() + coefficients.size());
        reach_ = tail_radius(kDefaultTailTol) * std::sqrt(set.lattice().hbar());
    }

    /// (u(x), u'(x)).
    std::pair<complex, complex> eval(double x) const {
        complex u = 0.0, du = 0.0;
        for (std::size_t j = 0; j < states_.size(); ++j) {
            const auto& s = states_[j];
            if (std::abs(x - s.x0()) > reach_) continue;
            const complex v = coeffs_[j] * eval_state(s, x);
            u += v;
            du += v * complex{-(x - s.x0()), s.xi0()} / s.hbar();
        }
        return {u, du};
    }

private:
    std::vector<CoherentState> states_;
    std::vector<complex> coeffs_;
    double reach_;
};

/// Normal matrix A^H A, Hermitian by construction (lower triangle mirrored).
inline Eigen::MatrixXcd gram_matrix(const DesignSystem& sys) {
    const auto N = sys.matrix.cols();
    Eigen::MatrixXcd G = Eigen::MatrixXcd::Zero(N, N);
    G.selfadjointView<Eigen::Lower>().rankUpdate(sys.matrix.adjoint());
    for (Eigen::Index j = 0; j < N; ++j) {
        G(j, j) = G(j, j).real();
        for (Eigen::Index i = j + 1; i < N; ++i) G(j, i) = std::conj(G(i, j));
    }
    return G;
}

/// Rows "i,j,m_i,n_i,m_j,n_j,abs" of |A^H A| entries at or above `floor`.
inline void write_gram_modulus_csv(std::ostream& out, const DesignSystem& sys, double floor = 0.0) {
    const Eigen::MatrixXcd G = gram_matrix(sys);
    out << "i,j,m_i,n_i,m_j,n_j,abs\n";
    char buf[200];
    for (Eigen::Index i = 0; i < G.rows(); ++i)
        for (Eigen::Index j = 0; j < G.cols(); ++j) {
            const double v = std::abs(G(i, j));
            if (v < floor) continue;
            const auto& p = sys.columns.members()[static_cast<std::size_t>(i)];
            const auto& q = sys.columns.members()[static_cast<std::size_t>(j)];
            std::snprintf(buf, sizeof buf, "%ld,%ld,%ld,%ld,%ld,%ld,%.6e\n", static_cast<long>(i), static_cast<long>(j),
                          p.m, p.n, q.m, q.n, v);
            out << buf;
        }
}

}  // namespace gcs
