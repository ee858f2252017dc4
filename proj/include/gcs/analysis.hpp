#pragma once

// Error norms, frame diagnostics and localization probes.

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <numeric>
#include <ostream>
#include <stdexcept>
#include <utility>
#include <vector>

#include "gcs/coherent_state.hpp"
#include "gcs/phase_space.hpp"
#include "gcs/problem.hpp"
#include "gcs/quadrature.hpp"
#include "gcs/residual.hpp"

namespace gcs {

// ---------------------------------------------------------------------------
// H^1_k error

/// x -> (u(x), u'(x)).
using FieldFn = std::function<std::pair<complex, complex>(double)>;

struct ErrorReport {
    double absolute = 0.0;
    double relative = 0.0;
    double reference_norm = 0.0;
    Interval window{};
    std::size_t quadrature_nodes = 0;
};

/// (||du||^2 + k^{-2} ||du'||^2)^{1/2} over the rule's window, and its ratio to
/// the same norm of the reference.
inline ErrorReport h1k_error(const FieldFn& approx, const FieldFn& ref, double k, const QuadratureRule& rule) {
    double diff = 0.0, norm = 0.0;
    const double k2 = 1.0 / (k * k);
    for (std::size_t q = 0; q < rule.size(); ++q) {
        const auto [ua, da] = approx(rule.nodes[q]);
        const auto [ur, dr] = ref(rule.nodes[q]);
        diff += rule.weights[q] * (std::norm(ua - ur) + k2 * std::norm(da - dr));
        norm += rule.weights[q] * (std::norm(ur) + k2 * std::norm(dr));
    }
    if (norm == 0.0) throw std::invalid_argument("h1k_error: reference has zero norm on the window");
    ErrorReport rep;
    rep.absolute = std::sqrt(diff);
    rep.reference_norm = std::sqrt(norm);
    rep.relative = rep.absolute / rep.reference_norm;
    rep.window = rule.window;
    rep.quadrature_nodes = rule.size();
    return rep;
}

inline ErrorReport h1k_error(const FieldFn& approx, const FieldFn& ref, Interval window, double k,
                             int nodes_per_wavelength = 20) {
    return h1k_error(approx, ref, k, build_rule(window, k, nodes_per_wavelength));
}

// ---------------------------------------------------------------------------
// Frame diagnostics on truncated lattice boxes

/// Pairs (m, n) with |m - c.m|, |n - c.n| <= half_width, lexicographic.
inline std::vector<IndexPair> box_pairs(long half_width, IndexPair center = {0, 0}) {
    if (half_width < 0) throw std::invalid_argument("box_pairs: negative half-width");
    std::vector<IndexPair> out;
    for (long m = center.m - half_width; m <= center.m + half_width; ++m)
        for (long n = center.n - half_width; n <= center.n + half_width; ++n) out.push_back({m, n});
    return out;
}

/// G(i, j) = (psi_j, psi_i) over the listed lattice states.
inline Eigen::MatrixXcd lattice_gram(const LatticeSpec& spec, const std::vector<IndexPair>& rows,
                                     const std::vector<IndexPair>& cols) {
    Eigen::MatrixXcd G(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols.size()));
    for (std::size_t j = 0; j < cols.size(); ++j) {
        const auto sj = CoherentState::at(spec, cols[j]);
        for (std::size_t i = 0; i < rows.size(); ++i)
            G(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = overlap(sj, CoherentState::at(spec, rows[i]));
    }
    return G;
}

/// Sparse Gram matrix; entries with squared lattice distance above `reach2` are
/// dropped (|overlap| = e^{-pi d^2 / 4}, so 60 leaves e^{-47}).
inline Eigen::SparseMatrix<complex> sparse_lattice_gram(const LatticeSpec& spec, const std::vector<IndexPair>& pairs,
                                                        long reach2 = 60) {
    std::map<IndexPair, Eigen::Index> index;
    for (std::size_t i = 0; i < pairs.size(); ++i) index[pairs[i]] = static_cast<Eigen::Index>(i);
    const long r = static_cast<long>(std::floor(std::sqrt(static_cast<double>(reach2))));
    std::vector<Eigen::Triplet<complex>> trip;
    for (std::size_t j = 0; j < pairs.size(); ++j) {
        const auto sj = CoherentState::at(spec, pairs[j]);
        for (long dm = -r; dm <= r; ++dm)
            for (long dn = -r; dn <= r; ++dn) {
                if (dm * dm + dn * dn > reach2) continue;
                const auto it = index.find({pairs[j].m + dm, pairs[j].n + dn});
                if (it == index.end()) continue;
                trip.emplace_back(it->second, static_cast<Eigen::Index>(j),
                                  overlap(sj, CoherentState::at(spec, it->first)));
            }
    }
    const auto n = static_cast<Eigen::Index>(pairs.size());
    Eigen::SparseMatrix<complex> G(n, n);
    G.setFromTriplets(trip.begin(), trip.end());
    return G;
}

struct FrameBounds {
    double alpha = 0.0;
    double beta = 0.0;
    long box_half_width = 0;
    long margin = 0;

    double ratio() const { return beta / alpha; }
};

/// Extremal values of sum_j |(v, psi_j)|^2 / ||v||^2 over v in the span of the
/// interior states (margin steps from the box edge), j over the whole box.
///
/// Rayleigh quotient of the generalized problem G_IA G_AI a = lambda G_II a,
/// reduced through the eigendecomposition of G_II (directions below
/// 1e-10 * max eigenvalue are dropped).
inline FrameBounds frame_bounds(const LatticeSpec& spec, long box_half_width, long margin = 5) {
    if (margin < 0 || margin > box_half_width) throw std::invalid_argument("frame_bounds: margin outside [0, box]");
    const auto all = box_pairs(box_half_width);
    const auto interior = box_pairs(box_half_width - margin);
    const Eigen::MatrixXcd GAI = lattice_gram(spec, all, interior);
    const Eigen::MatrixXcd GII = lattice_gram(spec, interior, interior);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(GII);
    if (eig.info() != Eigen::Success) throw std::runtime_error("frame_bounds: eigensolver did not converge");
    const Eigen::VectorXd& lam = eig.eigenvalues();
    const double cut = 1e-10 * lam.maxCoeff();
    std::vector<Eigen::Index> keep;
    for (Eigen::Index i = 0; i < lam.size(); ++i)
        if (lam(i) > cut) keep.push_back(i);
    Eigen::MatrixXcd W(GII.rows(), static_cast<Eigen::Index>(keep.size()));
    for (std::size_t c = 0; c < keep.size(); ++c)
        W.col(static_cast<Eigen::Index>(c)) = eig.eigenvectors().col(keep[c]) / std::sqrt(lam(keep[c]));
    const Eigen::MatrixXcd B = GAI * W;
    const Eigen::MatrixXcd M = B.adjoint() * B;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> em(M, Eigen::EigenvaluesOnly);
    if (em.info() != Eigen::Success) throw std::runtime_error("frame_bounds: eigensolver did not converge");
    return {em.eigenvalues().minCoeff(), em.eigenvalues().maxCoeff(), box_half_width, margin};
}

/// sum_j |(v, psi_j)|^2 / ||v||^2 for v = sum_i a_i psi_i (i over `support`),
/// j over `family`.
inline double analysis_rayleigh_quotient(const LatticeSpec& spec, const std::vector<IndexPair>& family,
                                         const std::vector<IndexPair>& support, const Eigen::VectorXcd& a) {
    const Eigen::VectorXcd y = lattice_gram(spec, family, support) * a;
    const complex nv = a.dot(lattice_gram(spec, support, support) * a);
    return y.squaredNorm() / nv.real();
}

struct DualFrameResult {
    IndexPair target;
    std::vector<IndexPair> box;
    Eigen::VectorXcd coefficients;  ///< psi*_target = sum_j c_j psi_j (truncated)
    int iterations = 0;
    double residual = 0.0;          ///< || G^2 c - G e_t || / || G e_t ||
};

/// Coefficients of the dual state psi*_target = S^{-1} psi_target in the box
/// family: the minimum-norm solution of G c = e_t, obtained by conjugate
/// gradients on G^2 c = G e_t from c = 0.
inline DualFrameResult dual_frame_coefficients(const LatticeSpec& spec, IndexPair target, long box_half_width = 25,
                                               double tol = 1e-12, int max_iter = 20000) {
    if (box_half_width < 10) throw std::invalid_argument("dual_frame_coefficients: box must leave a margin of 10 steps");
    DualFrameResult res;
    res.target = target;
    res.box = box_pairs(box_half_width, target);
    const Eigen::SparseMatrix<complex> G = sparse_lattice_gram(spec, res.box);
    const auto n = G.rows();
    const auto t = std::find(res.box.begin(), res.box.end(), target) - res.box.begin();
    Eigen::VectorXcd et = Eigen::VectorXcd::Zero(n);
    et(t) = 1.0;
    const Eigen::VectorXcd rhs = G * et;
    const double bnorm = rhs.norm();
    Eigen::VectorXcd c = Eigen::VectorXcd::Zero(n);
    Eigen::VectorXcd r = rhs, p = r;
    double rr = r.squaredNorm();
    int it = 0;
    for (; it < max_iter && std::sqrt(rr) > tol * bnorm; ++it) {
        const Eigen::VectorXcd Gp = G * p;
        const double pAp = Gp.squaredNorm();  // p^H G^2 p
        const double alpha = rr / pAp;
        c += alpha * p;
        r -= alpha * (G * Gp);
        const double rr_new = r.squaredNorm();
        p = r + (rr_new / rr) * p;
        rr = rr_new;
    }
    res.coefficients = std::move(c);
    res.iterations = it;
    res.residual = std::sqrt(rr) / bnorm;
    if (res.residual > 1e3 * tol) {
        char msg[160];
        std::snprintf(msg, sizeof msg, "dual_frame_coefficients: stagnated after %d iterations, residual %.3e", it,
                      res.residual);
        throw std::runtime_error(msg);
    }
    return res;
}

struct DecayFit {
    double slope = 0.0;      ///< of log(max |c|) against sqrt(distance)
    double intercept = 0.0;
    double r_squared = 0.0;
    std::vector<double> distance;
    std::vector<double> value;
};

/// Least-squares line through (x_i, y_i).
inline std::pair<double, double> linear_fit(const std::vector<double>& x, const std::vector<double>& y,
                                            double* r_squared = nullptr) {
    if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("linear_fit: need at least two points");
    const double n = static_cast<double>(x.size());
    const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
    const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    if (sxx == 0.0) throw std::invalid_argument("linear_fit: degenerate abscissae");
    const double slope = sxy / sxx;
    if (r_squared) *r_squared = syy > 0.0 ? sxy * sxy / (sxx * syy) : 1.0;
    return {slope, my - slope * mx};
}

/// Decay of |c| with lattice distance from the target: the maximum over each
/// unit-width distance shell, fitted as log max|c| ~ intercept + slope sqrt(dist).
/// Values below floor_rel * max |c| are left out.
inline DecayFit fit_dual_decay(const DualFrameResult& res, double floor_rel = 1e-13) {
    const double cmax = res.coefficients.cwiseAbs().maxCoeff();
    std::map<long, double> shell;
    for (std::size_t j = 0; j < res.box.size(); ++j) {
        const double dm = static_cast<double>(res.box[j].m - res.target.m);
        const double dn = static_cast<double>(res.box[j].n - res.target.n);
        const long d = std::lround(std::sqrt(dm * dm + dn * dn));
        if (d == 0) continue;
        auto& v = shell[d];
        v = std::max(v, std::abs(res.coefficients(static_cast<Eigen::Index>(j))));
    }
    DecayFit fit;
    std::vector<double> sx, ly;
    for (const auto& [d, v] : shell) {
        if (v < floor_rel * cmax) continue;
        fit.distance.push_back(static_cast<double>(d));
        fit.value.push_back(v);
        sx.push_back(std::sqrt(static_cast<double>(d)));
        ly.push_back(std::log(v));
    }
    std::tie(fit.slope, fit.intercept) = linear_fit(sx, ly, &fit.r_squared);
    return fit;
}

/// Rows "distance,value,fitted".
inline void write_decay_csv(std::ostream& out, const DecayFit& fit) {
    out << "distance,value,fitted\n";
    char buf[120];
    for (std::size_t i = 0; i < fit.distance.size(); ++i) {
        const double f = std::exp(fit.intercept + fit.slope * std::sqrt(fit.distance[i]));
        std::snprintf(buf, sizeof buf, "%.6g,%.6e,%.6e\n", fit.distance[i], fit.value[i], f);
        out << buf;
    }
}

/// Dual-coefficient energy sum_j |(v, psi*_j)|^2 / ||v||^2 for v = sum a_i psi_i
/// over `support` inside the box, with psi*_j the canonical dual of the box family.
/// Equals |P a|^2 / (a^H G a) with P the spectral projector of G (eigenvalues
/// below 1e-10 * max dropped).
inline double dual_energy_ratio(const LatticeSpec& spec, long box_half_width, const std::vector<IndexPair>& support,
                                const Eigen::VectorXcd& a) {
    const auto box = box_pairs(box_half_width);
    const Eigen::MatrixXcd G = lattice_gram(spec, box, box);
    Eigen::VectorXcd full = Eigen::VectorXcd::Zero(G.rows());
    for (std::size_t i = 0; i < support.size(); ++i) {
        const auto it = std::find(box.begin(), box.end(), support[i]);
        if (it == box.end()) throw std::invalid_argument("dual_energy_ratio: support outside the box");
        full(it - box.begin()) = a(static_cast<Eigen::Index>(i));
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(G);
    const Eigen::VectorXd& lam = eig.eigenvalues();
    const double cut = 1e-10 * lam.maxCoeff();
    const Eigen::VectorXcd hat = eig.eigenvectors().adjoint() * full;
    double num = 0.0, den = 0.0;
    for (Eigen::Index i = 0; i < lam.size(); ++i) {
        den += std::max(lam(i), 0.0) * std::norm(hat(i));
        if (lam(i) > cut) num += std::norm(hat(i));
    }
    return num / den;
}

// ---------------------------------------------------------------------------
// Probes

/// |(P psi_{m,n}, psi_base)| maximized over lattice shells max(|dm|, |dn|) = D,
/// for the constant-coefficient operator -hbar^2 d^2 - 1 of the physical region.
struct QuasiOrthogonalityProfile {
    double hbar = 0.0;
    IndexPair base;
    std::vector<long> distances;
    std::vector<double> max_values;
};

inline QuasiOrthogonalityProfile quasi_orthogonality_profile(double hbar, const std::vector<long>& distances) {
    const LatticeSpec spec(hbar);
    QuasiOrthogonalityProfile prof;
    prof.hbar = hbar;
    prof.base = {0, std::lround(1.0 / spec.spacing())};
    prof.distances = distances;
    const auto sb = CoherentState::at(spec, prof.base);
    for (long D : distances) {
        if (D < 1) throw std::invalid_argument("quasi_orthogonality_profile: distances must be positive");
        double best = 0.0;
        for (long dm = -D; dm <= D; ++dm)
            for (long dn = -D; dn <= D; ++dn) {
                if (std::max(std::abs(dm), std::abs(dn)) != D) continue;
                const auto s = CoherentState::at(spec, {prof.base.m + dm, prof.base.n + dn});
                best = std::max(best, std::abs(operator_overlap(s, sb, 1.0, 0.0, -1.0)));
            }
        prof.max_values.push_back(best);
    }
    return prof;
}

/// (f, psi) for f = phi(x) e^{ikx} on supp phi = [-3/4, 3/4].
inline complex planewave_coefficient(double k, const CoherentState& s, int nodes_per_wavelength = 40) {
    const double reach = tail_radius(kDefaultTailTol) * std::sqrt(s.hbar());
    const double lo = std::max(-0.75, s.x0() - reach), hi = std::min(0.75, s.x0() + reach);
    if (!(hi > lo)) return 0.0;
    const auto phi = cutoff_phi_model();
    const double k_eff = k * (1.0 + std::abs(s.xi0()));
    return inner_product([&](double x) { return phi.value(x) * plane_wave(k, x); },
                         [&](double x) { return eval_state(s, x); }, build_rule({lo, hi}, k_eff, nodes_per_wavelength));
}

struct PlanewaveProbe {
    double k = 0.0;
    double epsilon = 0.0;
    std::size_t inside_count = 0;
    std::size_t outside_count = 0;
    double max_inside = 0.0;
    double max_outside = 0.0;
    IndexPair argmax_outside;

    double ratio() const { return max_outside / max_inside; }
};

/// |(f_k, psi_{m,n})| with f_k = phi e^{ikx}, split by membership in the
/// plane-wave set over supp phi. Candidates: states within 12 sqrt(hbar) of
/// supp phi with |xi| <= xi_max.
inline PlanewaveProbe planewave_coefficient_probe(const ProblemCase& pc, double epsilon, double xi_max = 3.0) {
    const double k = pc.k;
    const LatticeSpec spec = LatticeSpec::for_wavenumber(k);
    const auto lam = build_planewave_rhs_set(spec, -0.75, 0.75, epsilon);
    const double h = spec.spacing();
    const double reach = tail_radius(kDefaultTailTol) * std::sqrt(spec.hbar());
    const long m_abs = static_cast<long>(std::floor((0.75 + reach) / h));
    const long n_abs = static_cast<long>(std::floor(xi_max / h));

    // one global rule on supp phi, fine enough for e^{i(k - xi/hbar) x}
    const auto rule = build_rule({-0.75, 0.75}, k * (1.0 + xi_max), 40);
    const auto phi = cutoff_phi_model();
    std::vector<complex> f(rule.size());
    for (std::size_t q = 0; q < rule.size(); ++q) f[q] = rule.weights[q] * phi.value(rule.nodes[q]) * plane_wave(k, rule.nodes[q]);

    PlanewaveProbe probe;
    probe.k = k;
    probe.epsilon = epsilon;
    const double hb = spec.hbar();
    const double amp = std::pow(std::numbers::pi * hb, -0.25);
    for (long m = -m_abs; m <= m_abs; ++m) {
        const double x0 = lattice_point(m, spec);
        const auto q0 = std::lower_bound(rule.nodes.begin(), rule.nodes.end(), x0 - reach) - rule.nodes.begin();
        const auto q1 = std::upper_bound(rule.nodes.begin(), rule.nodes.end(), x0 + reach) - rule.nodes.begin();
        std::vector<complex> g;
        std::vector<complex> step;
        std::vector<complex> phase;
        for (auto q = q0; q < q1; ++q) {
            const double y = rule.nodes[static_cast<std::size_t>(q)] - x0;
            g.push_back(f[static_cast<std::size_t>(q)] * amp * std::exp(-y * y / (2.0 * hb)));
            step.push_back(std::polar(1.0, -h * y / hb));
        }
        for (long n = -n_abs; n <= n_abs; ++n) {
            const double xi = lattice_point(n, spec);
            if ((n + n_abs) % 32 == 0) {
                phase.resize(g.size());
                for (std::size_t i = 0; i < g.size(); ++i)
                    phase[i] = std::polar(1.0, -xi * (rule.nodes[static_cast<std::size_t>(q0) + i] - x0) / hb);
            }
            complex acc = 0.0;
            for (std::size_t i = 0; i < g.size(); ++i) {
                acc += g[i] * phase[i];
                phase[i] *= step[i];
            }
            const double v = std::abs(acc);
            if (lam.contains({m, n})) {
                ++probe.inside_count;
                probe.max_inside = std::max(probe.max_inside, v);
            } else {
                ++probe.outside_count;
                if (v > probe.max_outside) {
                    probe.max_outside = v;
                    probe.argmax_outside = {m, n};
                }
            }
        }
    }
    return probe;
}

}  // namespace gcs
