#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "gcs/analysis.hpp"

using namespace gcs;

TEST(H1kError, Identities) {
    const double k = 30.0;
    const FieldFn u = [k](double x) {
        const complex e = plane_wave(k, x);
        return std::pair{e, complex{0.0, k} * e};
    };
    const FieldFn u2 = [&](double x) {
        auto [a, b] = u(x);
        return std::pair{2.0 * a, 2.0 * b};
    };
    const auto rule = build_rule({-1.0, 1.0}, k);
    EXPECT_EQ(h1k_error(u, u, k, rule).absolute, 0.0);
    EXPECT_NEAR(h1k_error(u2, u, k, rule).relative, 1.0, 1e-13);
    EXPECT_NEAR(h1k_error(u2, u, k, rule).reference_norm, 2.0, 1e-13);  // sqrt(2 + 2)
    const FieldFn zero = [](double) { return std::pair{complex(0.0), complex(0.0)}; };
    EXPECT_THROW(h1k_error(u, zero, k, rule), std::invalid_argument);
}

TEST(H1kError, SymmetricAndTriangle) {
    const double k = 15.0;
    std::mt19937 rng(12);
    std::uniform_real_distribution<double> p(-3.0, 3.0);
    auto make = [&]() {
        const double a = p(rng), b = p(rng), c = p(rng);
        return FieldFn([=](double x) {
            return std::pair{complex(std::sin(a * x), b * x * x), complex(a * std::cos(a * x), 2 * b * x + c * 0.0)};
        });
    };
    const auto rule = build_rule({-1.0, 1.0}, k);
    for (int t = 0; t < 10; ++t) {
        const auto f = make(), g = make(), h = make();
        const double fg = h1k_error(f, g, k, rule).absolute;
        EXPECT_NEAR(fg, h1k_error(g, f, k, rule).absolute, 1e-14);
        EXPECT_LE(fg, h1k_error(f, h, k, rule).absolute + h1k_error(h, g, k, rule).absolute + 1e-13);
    }
}

TEST(FrameBounds, SingleElementFamily) {
    const auto fb = frame_bounds(LatticeSpec(0.05), 0, 0);
    EXPECT_NEAR(fb.alpha, 1.0, 1e-14);
    EXPECT_NEAR(fb.beta, 1.0, 1e-14);
    const auto two = box_pairs(1);
    Eigen::VectorXcd a = Eigen::VectorXcd::Zero(1);
    a(0) = 1.0;
    EXPECT_GE(analysis_rayleigh_quotient(LatticeSpec(0.05), two, {{0, 0}}, a), 1.0);
}

TEST(FrameBounds, OrderedAndHbarStable) {
    const auto a = frame_bounds(LatticeSpec(1.0 / 20), 12);
    const auto b = frame_bounds(LatticeSpec(1.0 / 100), 12);
    EXPECT_GT(a.alpha, 0.0);
    EXPECT_GE(a.beta, a.alpha);
    EXPECT_TRUE(std::isfinite(a.ratio()));
    EXPECT_NEAR(a.ratio() / b.ratio(), 1.0, 0.2);
}

TEST(FrameBounds, SandwichAndDualEnergy) {
    const long B = 12;
    const LatticeSpec spec(1.0 / 20);
    const auto fb = frame_bounds(spec, B);
    const auto family = box_pairs(B);
    const double gamma = 1.0 / fb.alpha;
    std::mt19937 rng(77);
    std::uniform_int_distribution<long> pick(-(B - 5), B - 5);
    std::normal_distribution<double> g;
    for (int t = 0; t < 50; ++t) {
        std::vector<IndexPair> support;
        while (support.size() < 3) {
            const IndexPair p{pick(rng), pick(rng)};
            if (std::find(support.begin(), support.end(), p) == support.end()) support.push_back(p);
        }
        Eigen::VectorXcd a(3);
        for (int i = 0; i < 3; ++i) a(i) = complex(g(rng), g(rng));
        const double q = analysis_rayleigh_quotient(spec, family, support, a);
        EXPECT_GE(q, fb.alpha * (1 - 1e-10));
        EXPECT_LE(q, fb.beta * (1 + 1e-10));
        if (t < 5) {
            EXPECT_LE(dual_energy_ratio(spec, B, support, a), gamma);
        }
    }
}

TEST(DualFrame, ProjectionPropertiesAndDecay) {
    const LatticeSpec spec(1.0 / 100);
    const auto res = dual_frame_coefficients(spec, {0, 0}, 25);
    EXPECT_LE(res.residual, 1e-10);
    const auto G = sparse_lattice_gram(spec, res.box);
    const Eigen::VectorXcd d = G * res.coefficients;
    const auto t = std::find(res.box.begin(), res.box.end(), IndexPair{0, 0}) - res.box.begin();
    // G c is the projection of e_t onto the range of G
    EXPECT_GT(d(t).real(), 0.0);
    EXPECT_LT(d(t).real(), 1.0);
    EXPECT_NEAR(d.squaredNorm(), d(t).real(), 1e-8);
    const auto fit = fit_dual_decay(res);
    EXPECT_LT(fit.slope, 0.0);
    EXPECT_GE(fit.r_squared, 0.9);
    std::ostringstream os;
    write_decay_csv(os, fit);
    EXPECT_EQ(os.str().substr(0, 22), "distance,value,fitted\n");
    EXPECT_THROW(dual_frame_coefficients(spec, {0, 0}, 5), std::invalid_argument);
}

TEST(DualFrame, AgreesWithPseudoInverse) {
    const LatticeSpec spec(1.0 / 20);
    const auto res = dual_frame_coefficients(spec, {0, 0}, 10);
    const Eigen::MatrixXcd G = lattice_gram(spec, res.box, res.box);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(G);
    const auto t = std::find(res.box.begin(), res.box.end(), IndexPair{0, 0}) - res.box.begin();
    Eigen::VectorXcd hat = eig.eigenvectors().row(t).adjoint();
    // the truncated box has a continuous tail of small eigenvalues from its edges;
    // interior coefficients are insensitive to where that tail is cut
    const double cut = 1e-4 * eig.eigenvalues().maxCoeff();
    for (Eigen::Index i = 0; i < hat.size(); ++i) hat(i) = eig.eigenvalues()(i) > cut ? hat(i) / eig.eigenvalues()(i) : 0.0;
    const Eigen::VectorXcd pinv = eig.eigenvectors() * hat;
    double diff = 0.0, peak = 0.0;
    for (std::size_t i = 0; i < res.box.size(); ++i) {
        if (std::max(std::abs(res.box[i].m), std::abs(res.box[i].n)) > 5) continue;
        const auto ii = static_cast<Eigen::Index>(i);
        diff = std::max(diff, std::abs(pinv(ii) - res.coefficients(ii)));
        peak = std::max(peak, std::abs(pinv(ii)));
    }
    EXPECT_LE(diff, 1e-4 * peak);
}

TEST(DualFrame, EdgeInsensitivity) {
    const LatticeSpec spec(1.0 / 20);
    const auto a = dual_frame_coefficients(spec, {0, 0}, 20);
    const auto b = dual_frame_coefficients(spec, {0, 0}, 25);
    double worst = 0.0;
    for (std::size_t i = 0; i < a.box.size(); ++i) {
        const auto& p = a.box[i];
        if (std::max(std::abs(p.m), std::abs(p.n)) > 10) continue;
        const auto j = std::find(b.box.begin(), b.box.end(), p) - b.box.begin();
        worst = std::max(worst, std::abs(a.coefficients(static_cast<Eigen::Index>(i)) - b.coefficients(j)));
    }
    EXPECT_LE(worst, 1e-6);
}

TEST(QuasiOrthogonality, SuperPolynomialDecay) {
    const auto prof = quasi_orthogonality_profile(1.0 / 100, {2, 4, 8, 16});
    for (std::size_t i = 1; i < prof.max_values.size(); ++i)
        EXPECT_GE(prof.max_values[i - 1] / prof.max_values[i], 64.0);
    EXPECT_THROW(quasi_orthogonality_profile(0.01, {0}), std::invalid_argument);
}

TEST(PlaneWave, CoefficientsOnAndOffTheCharacteristic) {
    const double k = 100.0;
    const LatticeSpec spec = LatticeSpec::for_wavenumber(k);
    const auto on = CoherentState::at(spec, {0, std::lround(1.0 / spec.spacing())});
    EXPECT_GT(std::abs(planewave_coefficient(k, on)), 0.1);
    const auto off = CoherentState::at(spec, {0, std::lround(2.0 / spec.spacing())});
    EXPECT_LE(std::abs(planewave_coefficient(k, off)), std::exp(-k / 8.0));
}

TEST(PlaneWave, ProbeMatchesDirectQuadrature) {
    const double k = 50.0;
    const auto probe = planewave_coefficient_probe(make_case(CaseKind::Homogeneous, k), 0.3);
    const auto s = CoherentState::at(LatticeSpec::for_wavenumber(k), probe.argmax_outside);
    EXPECT_NEAR(std::abs(planewave_coefficient(k, s)), probe.max_outside, 1e-10);
    EXPECT_GT(probe.inside_count, 0u);
    EXPECT_GT(probe.outside_count, probe.inside_count);
}

TEST(PlaneWave, RatioDecreasesWithK) {
    std::vector<double> r;
    for (double k : {50.0, 100.0, 200.0})
        r.push_back(planewave_coefficient_probe(make_case(CaseKind::Homogeneous, k), 0.3).ratio());
    EXPECT_GT(r[0], r[1]);
    EXPECT_GT(r[1], r[2]);
}

TEST(LinearFit, ExactLine) {
    double r2 = 0.0;
    const auto [s, c] = linear_fit({0, 1, 2, 3}, {1, 3, 5, 7}, &r2);
    EXPECT_NEAR(s, 2.0, 1e-14);
    EXPECT_NEAR(c, 1.0, 1e-14);
    EXPECT_NEAR(r2, 1.0, 1e-14);
    EXPECT_THROW(linear_fit({1}, {1}), std::invalid_argument);
}
