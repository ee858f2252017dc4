#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "gcs/analysis.hpp"
#include "gcs/fem.hpp"

using namespace gcs;

namespace {

double fem_error(const FemSolution& sol, double k) {
    return h1k_error([&](double x) { return std::pair{fem_eval(sol, x, 0), fem_eval(sol, x, 1)}; },
                     [&](double x) { return exact_solution_homogeneous(x, k); }, {-1.0, 1.0}, k, 200)
        .relative;
}

}  // namespace

TEST(FemMesh, Layout) {
    const auto mesh = make_fem_mesh(100.0);
    EXPECT_NEAR(mesh.h_target, 0.02 * std::pow(100.0, -1.125), 1e-16);
    EXPECT_EQ(mesh.elements, static_cast<long>(std::ceil(7.0 / mesh.h_target)));
    EXPECT_EQ(mesh.dofs(), 4 * mesh.elements + 1);
    EXPECT_LE(mesh.element_size(), mesh.h_target);
    EXPECT_THROW(make_fem_mesh(0.5), std::invalid_argument);
    EXPECT_THROW(make_fem_mesh(20.0, 1.0), std::invalid_argument);
}

TEST(FemSolve, HomogeneousAgainstExactSolution) {
    const double k = 20.0;
    const auto sol = fem_solve(make_case(CaseKind::Homogeneous, k));
    EXPECT_LE(fem_error(sol, k), 1e-6);
    EXPECT_EQ(sol.nodal(0), complex(0.0));
    EXPECT_EQ(sol.nodal(sol.nodal.size() - 1), complex(0.0));
    // damped inside the layer
    double umax = sol.nodal.cwiseAbs().maxCoeff();
    EXPECT_LE(std::abs(fem_eval(sol, 3.4, 0)), 1e-6 * umax);
    EXPECT_LE(std::abs(fem_eval(sol, -3.4, 0)), 1e-6 * umax);
}

TEST(FemSolve, ConvergenceOrderFour) {
    const double k = 20.0;
    const auto pc = make_case(CaseKind::Homogeneous, k);
    std::vector<double> lh, le;
    for (double h : {0.04, 0.02, 0.01}) {
        const auto sol = fem_solve(pc, 3.5, h);
        lh.push_back(std::log(sol.mesh.element_size()));
        le.push_back(std::log(fem_error(sol, k)));
    }
    EXPECT_NEAR(linear_fit(lh, le).first, 4.0, 0.3);
}

TEST(FemSolve, RefinementAgainstFinerReference) {
    const auto pc = make_case(CaseKind::Heterogeneous, 20.0);
    const auto ref = fem_solve(pc, 3.5, 0.005);
    auto err = [&](double h) {
        const auto sol = fem_solve(pc, 3.5, h);
        return h1k_error([&](double x) { return std::pair{fem_eval(sol, x, 0), fem_eval(sol, x, 1)}; },
                         [&](double x) { return std::pair{fem_eval(ref, x, 0), fem_eval(ref, x, 1)}; }, {-1.0, 1.0},
                         20.0, 200)
            .relative;
    };
    const double e1 = err(0.04), e2 = err(0.02);
    EXPECT_NEAR(std::log2(e1 / e2), 4.0, 0.5);
}

TEST(FemSolve, TruncationInsensitivity) {
    const double k = 20.0;
    const auto pc = make_case(CaseKind::Heterogeneous, k);
    const auto a = fem_solve(pc, 3.5, 0.005);
    const auto b = fem_solve(pc, 4.0, 0.005);
    const double rel =
        h1k_error([&](double x) { return std::pair{fem_eval(a, x, 0), fem_eval(a, x, 1)}; },
                  [&](double x) { return std::pair{fem_eval(b, x, 0), fem_eval(b, x, 1)}; }, {-1.0, 1.0}, k, 200)
            .relative;
    EXPECT_LE(rel, 1e-7);
}

TEST(FemEval, InterpolationProperties) {
    const auto pc = make_case(CaseKind::Heterogeneous, 20.0);
    auto sol = fem_solve(pc, 3.5, 0.05);
    for (long i : {0L, 7L, 101L, sol.mesh.dofs() - 1})
        EXPECT_LE(std::abs(fem_eval(sol, sol.mesh.node(i), 0) - sol.nodal(i)), 1e-13 * (1.0 + std::abs(sol.nodal(i))));
    std::mt19937 rng(4);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    for (int t = 0; t < 20; ++t) {
        const double x = u(rng), h = 1e-6;
        const complex fd = (fem_eval(sol, x + h, 0) - fem_eval(sol, x - h, 0)) / (2 * h);
        const complex d = fem_eval(sol, x, 1);
        // skip points straddling an element boundary
        const double t_loc = std::fmod(x + 3.5, sol.mesh.element_size()) / sol.mesh.element_size();
        if (t_loc < 1e-4 || t_loc > 1 - 1e-4) continue;
        EXPECT_LE(std::abs(fd - d), 1e-6 * std::max(1.0, std::abs(d)));
    }
    FemSolution flat = sol;
    flat.nodal.setConstant(complex(2.0, -1.0));
    EXPECT_NEAR(std::abs(fem_eval(flat, 0.123, 1)), 0.0, 1e-9);
    EXPECT_THROW(fem_eval(sol, 3.6, 0), std::out_of_range);
    EXPECT_THROW(fem_eval(sol, 0.0, 2), std::invalid_argument);
}

TEST(FemEval, NodalCsv) {
    const auto sol = fem_solve(make_case(CaseKind::Heterogeneous, 20.0), 3.5, 0.5);
    std::ostringstream os;
    write_fem_nodal_csv(os, sol);
    const std::string s = os.str();
    EXPECT_EQ(s.substr(0, s.find('\n')), "x,re,im");
    EXPECT_EQ(static_cast<long>(std::count(s.begin(), s.end(), '\n')), sol.mesh.dofs() + 1);
}
