#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "gcs/coherent_state.hpp"
#include "gcs/problem.hpp"
#include "gcs/quadrature.hpp"
#include "gcs/residual.hpp"

using namespace gcs;

namespace {

QuadratureRule oracle_rule(const CoherentState& a, const CoherentState& b) {
    const CoherentState both[] = {a, b};
    const double xi = std::max({std::abs(a.xi0()), std::abs(b.xi0()), std::abs(a.xi0() - b.xi0()), 1.0});
    return build_rule(support_window(both), xi / a.hbar(), 40, 12);
}

complex fd_derivative(const std::function<complex(double)>& f, double x, double h, int order) {
    // sixth-order central stencils
    if (order == 1)
        return (-f(x - 3 * h) + 9.0 * f(x - 2 * h) - 45.0 * f(x - h) + 45.0 * f(x + h) - 9.0 * f(x + 2 * h) +
                f(x + 3 * h)) / (60.0 * h);
    return (2.0 * f(x - 3 * h) - 27.0 * f(x - 2 * h) + 270.0 * f(x - h) - 490.0 * f(x) + 270.0 * f(x + h) -
            27.0 * f(x + 2 * h) + 2.0 * f(x + 3 * h)) / (180.0 * h * h);
}

double fit_slope(const std::vector<double>& xs, const std::vector<double>& ys) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = static_cast<double>(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sx += xs[i], sy += ys[i], sxx += xs[i] * xs[i], sxy += xs[i] * ys[i];
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace

TEST(CoherentState, UnitNormAndPeak) {
    for (double h : {1.0 / 20, 1.0 / 400}) {
        const CoherentState s(h, 0.3, -0.7);
        EXPECT_NEAR(std::abs(overlap(s, s) - 1.0), 0.0, 1e-15);
        EXPECT_NEAR(squared_norm([&](double x) { return eval_state(s, x); }, oracle_rule(s, s)), 1.0, 1e-12);
        EXPECT_NEAR(std::abs(eval_state(s, 0.3)), std::pow(std::numbers::pi * h, -0.25), 1e-12);
    }
    EXPECT_THROW(CoherentState(0.0, 0.0, 0.0), std::invalid_argument);
}

TEST(CoherentState, PhaseConvention) {
    // psi'(x0) = (i xi0 / hbar) psi(x0)
    const CoherentState s(0.05, 0.1, 0.9);
    const complex ratio = eval_derivative(s, 1, 0.1) / eval_state(s, 0.1);
    EXPECT_NEAR(ratio.real(), 0.0, 1e-12);
    EXPECT_NEAR(ratio.imag(), 0.9 / 0.05, 1e-10);
}

TEST(DerivativePolynomial, DegreesAndLowOrders) {
    for (int a = 0; a <= 4; ++a) {
        const auto& q = derivative_polynomial(a);
        EXPECT_LE(q.degree(), a);
        EXPECT_EQ(q.degree(), a);
    }
    EXPECT_EQ(derivative_polynomial(0).coefficient(0), 1.0);
    // q2 = z^2 - 1
    EXPECT_EQ(derivative_polynomial(2).coefficient(2), 1.0);
    EXPECT_EQ(derivative_polynomial(2).coefficient(0), -1.0);
    EXPECT_THROW(derivative_polynomial(5), std::invalid_argument);
    EXPECT_THROW(derivative_polynomial(-1), std::invalid_argument);
}

TEST(EvalDerivative, MatchesFiniteDifferences) {
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (double h : {0.1, 0.02}) {
        for (int trial = 0; trial < 20; ++trial) {
            const CoherentState s(h, u(rng), 1.5 * u(rng));
            const double x = s.x0() + std::sqrt(h) * u(rng);
            const double step = 1e-3 * std::sqrt(h);
            for (int a = 1; a <= 4; ++a) {
                auto lower = [&](double t) { return eval_derivative(s, a - 1, t); };
                const complex fd = fd_derivative(lower, x, step, 1);
                const complex ex = eval_derivative(s, a, x);
                EXPECT_LE(std::abs(fd - ex), 1e-7 * (std::abs(ex) + std::pow(h, -0.5 * a)))
                    << "order " << a << " h " << h;
            }
        }
    }
}

TEST(Overlap, AgreesWithQuadratureOracle) {
    std::mt19937 rng(2024);
    std::uniform_real_distribution<double> ux(-1.5, 1.5);
    for (double h : {1.0 / 20, 1.0 / 400}) {
        const double reach = 6.0 * std::sqrt(h);
        std::uniform_real_distribution<double> ud(-reach, reach);
        for (int i = 0; i < 100; ++i) {
            const CoherentState a(h, ux(rng), ux(rng));
            const CoherentState b(h, a.x0() + ud(rng), a.xi0() + ud(rng));
            const complex quad =
                inner_product([&](double x) { return eval_state(a, x); }, [&](double x) { return eval_state(b, x); },
                              oracle_rule(a, b));
            const complex ana = overlap(a, b);
            EXPECT_LE(std::abs(quad - ana), 1e-12);
            const double dx = a.x0() - b.x0(), dxi = a.xi0() - b.xi0();
            EXPECT_NEAR(std::abs(ana), std::exp(-(dx * dx + dxi * dxi) / (4 * h)), 1e-12);
        }
    }
    EXPECT_THROW(overlap(CoherentState(0.1, 0, 0), CoherentState(0.2, 0, 0)), std::invalid_argument);
}

TEST(Overlap, LatticeOverlapIsHbarInvariant) {
    for (long dm : {0L, 1L, 3L})
        for (long dn : {0L, 2L}) {
            const LatticeSpec s1(1.0 / 20), s2(1.0 / 100);
            const complex o1 = overlap(CoherentState::at(s1, {dm, 5 + dn}), CoherentState::at(s1, {0, 5}));
            const complex o2 = overlap(CoherentState::at(s2, {dm, 5 + dn}), CoherentState::at(s2, {0, 5}));
            EXPECT_NEAR(std::abs(o1 - o2), 0.0, 1e-12);
        }
}

TEST(MomentOverlaps, AgreeWithQuadrature) {
    const double h = 1.0 / 30;
    const CoherentState a(h, 0.2, 0.8), b(h, 0.35, 1.1);
    const auto mom = moment_overlaps(a, b, 4);
    const auto rule = oracle_rule(a, b);
    for (int j = 0; j <= 4; ++j) {
        const complex quad = inner_product([&](double x) { return std::pow(x - a.x0(), j) * eval_state(a, x); },
                                           [&](double x) { return eval_state(b, x); }, rule);
        EXPECT_LE(std::abs(quad - mom[j]), 1e-13) << j;
    }
}

TEST(ApplyOperator, MultiplierAndFiniteDifferences) {
    const auto pc = make_case(CaseKind::Homogeneous, 25.0);
    const auto op = helmholtz_operator(pc);
    const double h = pc.hbar();
    for (double x0 : {0.0, 1.3, -1.6}) {
        const CoherentState s(h, x0, 0.95);
        for (double t : {-1.0, 0.0, 0.7}) {
            const double x = x0 + t * std::sqrt(h);
            const complex direct = apply_operator(s, op, x);
            EXPECT_LE(std::abs(direct - operator_multiplier(s, op, x) * eval_state(s, x)), 1e-12 * std::abs(direct) + 1e-14);
            // against the model operator with finite-difference derivatives
            auto psi = [&](double y) { return eval_state(s, y); };
            const double step = 2e-3 * std::sqrt(h);
            const complex fd = apply_P(psi(x), fd_derivative(psi, x, step, 1), fd_derivative(psi, x, step, 2), x, pc);
            EXPECT_LE(std::abs(direct - fd), 1e-6 * (1.0 + std::abs(direct)));
        }
    }
}

TEST(ResidualFactor, ValueAtCenter) {
    // constant coefficients: r(x0) = a hbar
    const auto op = constant_operator(1.3, 0.4, -1.0);
    for (double h : {0.1, 0.01}) {
        const CoherentState s(h, 0.0, 1.0);
        const complex r = residual_factor(s, op, 0.0);
        EXPECT_NEAR(std::abs(r - 1.3 * h), 0.0, 1e-13);
    }
}

TEST(ResidualJet, SecondPowerMatchesNestedApplication) {
    const auto pc = make_case(CaseKind::Homogeneous, 30.0);
    const auto op = helmholtz_operator(pc);
    const CoherentState s(pc.hbar(), 1.2, 0.9);
    const complex p0 = op.symbol(s.x0(), s.xi0());
    auto v1 = [&](double y) { return residual_jet(s, op, 1, y).value() * eval_state(s, y); };
    for (double t : {-0.5, 0.0, 0.8}) {
        const double x = s.x0() + t * std::sqrt(s.hbar());
        const double step = 2e-3 * std::sqrt(s.hbar());
        const complex nested = apply_P(v1(x), fd_derivative(v1, x, step, 1), fd_derivative(v1, x, step, 2), x, pc) -
                               p0 * v1(x);
        const complex jet = residual_jet(s, op, 2, x).value() * eval_state(s, x);
        EXPECT_LE(std::abs(nested - jet), 1e-6 * (std::abs(jet) + 1e-3));
        EXPECT_NEAR(std::abs(residual_jet(s, op, 1, x).value() - residual_factor(s, op, x)), 0.0, 1e-12);
    }
    EXPECT_THROW(residual_jet(s, op, 6, 0.0), std::invalid_argument);
}

TEST(IteratedResidual, ClosedFormFreeCase) {
    // P = -hbar^2 d^2 at (0, 0): (P - 0) psi = (hbar - x^2) psi, norm sqrt(3)/2 hbar
    const auto op = constant_operator(1.0, 0.0, 0.0);
    for (double h : {0.1, 0.01, 0.001}) {
        const CoherentState s(h, 0.0, 0.0);
        EXPECT_NEAR(iterated_residual_norm(s, op, 1), std::sqrt(3.0) / 2.0 * h, 1e-12 * h);
    }
    EXPECT_THROW(iterated_residual_norm(CoherentState(0.1, 0, 0), op, 0), std::invalid_argument);
    EXPECT_THROW(iterated_residual_norm(CoherentState(0.1, 0, 0), op, 4), std::invalid_argument);
}

TEST(IteratedResidual, ScalingAndMonotonicity) {
    const auto op_at = [](double k) { return helmholtz_operator(make_case(CaseKind::Homogeneous, k)); };
    for (int L = 1; L <= 2; ++L) {
        std::vector<double> lx, ly;
        for (int e = 4; e <= 10; ++e) {
            const double h = std::ldexp(1.0, -e);
            lx.push_back(std::log(h));
            ly.push_back(std::log(iterated_residual_norm(CoherentState(h, 0.0, 1.0), op_at(1.0 / h), L)));
        }
        EXPECT_NEAR(fit_slope(lx, ly), 0.5 * L, 0.1) << "L=" << L;
    }
    const double h = 1.0 / 128;
    const auto op = op_at(128.0);
    const CoherentState s(h, 0.0, 1.0);
    EXPECT_LE(iterated_residual_norm(s, op, 2), iterated_residual_norm(s, op, 1));
    EXPECT_LE(iterated_residual_norm(s, op, 3), iterated_residual_norm(s, op, 2));
}

TEST(OperatorOverlap, ClosedFormMatchesQuadrature) {
    const double h = 1.0 / 40;
    const auto op = constant_operator(1.0, 0.0, -1.0);
    const CoherentState a(h, 0.1, 0.95), b(h, 0.25, 1.2);
    const complex quad = inner_product([&](double x) { return apply_operator(a, op, x); },
                                       [&](double x) { return eval_state(b, x); }, oracle_rule(a, b));
    EXPECT_LE(std::abs(quad - operator_overlap(a, b, 1.0, 0.0, -1.0)), 1e-13);
}
