#pragma once

// Degree-4 Lagrange finite elements on [-X, X] with homogeneous Dirichlet ends,
// used as reference solver for the PML Helmholtz problem.

#include <Eigen/Sparse>
#include <Eigen/SparseLU>
#include <array>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>
#include <vector>

#include "gcs/problem.hpp"
#include "gcs/quadrature.hpp"

namespace gcs {

inline constexpr double kDefaultFemXEnd = 3.5;

struct FemMesh {
    static constexpr int kDegree = 4;
    double x_end = kDefaultFemXEnd;
    double h_target = 0.0;
    long elements = 0;

    double element_size() const { return 2.0 * x_end / static_cast<double>(elements); }
    long dofs() const { return kDegree * elements + 1; }
    double node(long i) const { return -x_end + element_size() * static_cast<double>(i) / kDegree; }
};

/// h = 0.02 k^{-9/8} unless h > 0 is given.
inline FemMesh make_fem_mesh(double k, double x_end = kDefaultFemXEnd, double h = 0.0) {
    if (!(k >= 1.0)) throw std::invalid_argument("fem: wavenumber must be >= 1");
    if (!(x_end > 1.0)) throw std::invalid_argument("fem: X_end must exceed 1");
    if (h <= 0.0) h = 0.02 * std::pow(k, -9.0 / 8.0);
    FemMesh mesh;
    mesh.x_end = x_end;
    mesh.h_target = h;
    mesh.elements = static_cast<long>(std::ceil(2.0 * x_end / h - 1e-9));
    return mesh;
}

namespace detail {

/// Values and derivatives (w.r.t. the reference coordinate t in [0, 1]) of the
/// five Lagrange shape functions with nodes t_i = i/4.
inline void lagrange4(double t, std::array<double, 5>& v, std::array<double, 5>& dv) {
    for (int i = 0; i < 5; ++i) {
        const double ti = 0.25 * i;
        double val = 1.0, der = 0.0;
        for (int j = 0; j < 5; ++j) {
            if (j == i) continue;
            const double tj = 0.25 * j;
            der = der * (t - tj) / (ti - tj) + val / (ti - tj);
            val *= (t - tj) / (ti - tj);
        }
        v[static_cast<std::size_t>(i)] = val;
        dv[static_cast<std::size_t>(i)] = der;
    }
}

}  // namespace detail

struct FemSolution {
    FemMesh mesh;
    double k = 0.0;
    Eigen::VectorXcd nodal;  ///< all 4E+1 nodes, including the Dirichlet ends
};

/// Solves int k^{-2} alpha nu^{-1} u' conj(v)' - mu nu u conj(v) = int f conj(v)
/// with 6-point Gauss-Legendre per element.
inline FemSolution fem_solve(const ProblemCase& pc, double x_end = kDefaultFemXEnd, double h = 0.0) {
    const FemMesh mesh = make_fem_mesh(pc.k, x_end, h);
    const long E = mesh.elements;
    const long ndof = mesh.dofs();
    const long ninner = ndof - 2;  // unknowns 1..ndof-2
    const double he = mesh.element_size();
    const double k2 = pc.k * pc.k;

    const auto gl = gauss_legendre(6);
    std::array<std::array<double, 5>, 6> phi{}, dphi{};
    for (std::size_t g = 0; g < 6; ++g) detail::lagrange4(0.5 * (gl.nodes[g] + 1.0), phi[g], dphi[g]);

    const auto stiff = pc.stiffness();
    const auto mu_nu = pc.mu * pc.nu;
    std::vector<Eigen::Triplet<complex>> trip;
    trip.reserve(static_cast<std::size_t>(E) * 25);
    Eigen::VectorXcd b = Eigen::VectorXcd::Zero(ninner);

    for (long e = 0; e < E; ++e) {
        const double x0 = -mesh.x_end + he * static_cast<double>(e);
        std::array<std::array<complex, 5>, 5> K{};
        std::array<complex, 5> F{};
        for (std::size_t g = 0; g < 6; ++g) {
            const double x = x0 + 0.5 * he * (gl.nodes[g] + 1.0);
            const double w = 0.5 * he * gl.weights[g];
            const complex s = stiff.value(x) / k2;
            const complex m = mu_nu.value(x);
            const complex f = pc.rhs(x);
            for (std::size_t i = 0; i < 5; ++i) {
                const double di = dphi[g][i] / he;
                F[i] += w * f * phi[g][i];
                for (std::size_t j = 0; j < 5; ++j) K[i][j] += w * (s * (dphi[g][j] / he) * di - m * phi[g][j] * phi[g][i]);
            }
        }
        for (long i = 0; i < 5; ++i) {
            const long gi = 4 * e + i - 1;
            if (gi < 0 || gi >= ninner) continue;
            b(gi) += F[static_cast<std::size_t>(i)];
            for (long j = 0; j < 5; ++j) {
                const long gj = 4 * e + j - 1;
                if (gj < 0 || gj >= ninner) continue;
                trip.emplace_back(gi, gj, K[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]);
            }
        }
    }
    Eigen::SparseMatrix<complex> A(ninner, ninner);
    A.setFromTriplets(trip.begin(), trip.end());
    A.makeCompressed();
    Eigen::SparseLU<Eigen::SparseMatrix<complex>, Eigen::COLAMDOrdering<int>> lu;
    lu.compute(A);
    if (lu.info() != Eigen::Success) throw std::runtime_error("fem_solve: singular system (" + lu.lastErrorMessage() + ")");
    const Eigen::VectorXcd u = lu.solve(b);
    if (lu.info() != Eigen::Success) throw std::runtime_error("fem_solve: back substitution failed");

    FemSolution sol;
    sol.mesh = mesh;
    sol.k = pc.k;
    sol.nodal = Eigen::VectorXcd::Zero(ndof);
    sol.nodal.segment(1, ninner) = u;
    return sol;
}

/// Value (order 0) or derivative (order 1) of the finite element field at x.
inline complex fem_eval(const FemSolution& sol, double x, int derivative_order) {
    if (derivative_order < 0 || derivative_order > 1) throw std::invalid_argument("fem_eval: order outside [0, 1]");
    const double X = sol.mesh.x_end;
    if (!(x >= -X && x <= X)) throw std::out_of_range("fem_eval: x outside the FEM domain");
    const double he = sol.mesh.element_size();
    long e = static_cast<long>(std::floor((x + X) / he));
    e = std::clamp(e, 0L, sol.mesh.elements - 1);
    const double t = (x + X) / he - static_cast<double>(e);
    std::array<double, 5> v{}, dv{};
    detail::lagrange4(t, v, dv);
    complex acc = 0.0;
    for (long i = 0; i < 5; ++i) {
        const double wgt = derivative_order == 0 ? v[static_cast<std::size_t>(i)] : dv[static_cast<std::size_t>(i)] / he;
        acc += wgt * sol.nodal(4 * e + i);
    }
    return acc;
}

/// Rows "x,re,im" of the nodal values.
inline void write_fem_nodal_csv(std::ostream& out, const FemSolution& sol) {
    out << "x,re,im\n";
    char buf[120];
    for (long i = 0; i < sol.mesh.dofs(); ++i) {
        std::snprintf(buf, sizeof buf, "%.12g,%.12e,%.12e\n", sol.mesh.node(i), sol.nodal(i).real(), sol.nodal(i).imag());
        out << buf;
    }
}

}  // namespace gcs
