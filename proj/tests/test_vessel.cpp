#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "vessel_lab/fixtures.hpp"

using namespace vessel_lab;
using fixtures::row;

namespace {

// Random dissipative SL vessel: distinct imaginary nodes, rows [r_k, 0], diagonal X0 > 0.
Vessel random_diagonal_vessel(std::uint64_t seed, Eigen::Index n, double end) {
    std::mt19937_64 g(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    CMatrix A = CMatrix::Zero(n, n), B0 = CMatrix::Zero(n, 2), X0 = CMatrix::Zero(n, n);
    for (Eigen::Index k = 0; k < n; ++k) {
        A(k, k) = Complex(0.0, 0.5 + static_cast<double>(k) + 0.5 * u(g));
        B0(k, 0) = Complex(u(g) - 0.5, u(g) - 0.5) * 2.0;
        X0(k, k) = 0.5 + u(g);
    }
    return standard_construction(sl_parameters({0.0, end}), A, B0, X0, 0.0, {});
}

}  // namespace

TEST(Parameters, FamiliesAreValid) {
    for (Family f : {Family::SL, Family::NLS, Family::NLS4, Family::Canonical}) {
        const auto p = family_parameters(f, {0.0, 1.0});
        EXPECT_TRUE(validate(p).ok) << to_string(f);
        EXPECT_EQ(family_from_string(to_string(f)), f);
    }
    EXPECT_THROW(family_from_string("kdv"), ArgumentError);
}

TEST(Parameters, RejectNonHermitianSigma) {
    CMatrix s1(2, 2);
    s1 << 0.0, 1.0, 2.0, 0.0;
    const auto p = make_parameters(Family::Custom, s1, identity(2), CMatrix::Zero(2, 2), {0.0, 1.0});
    EXPECT_THROW(validate(p), ArgumentError);
}

TEST(EvolveB, ZeroInitialData) {
    const Vessel v = fixtures::zero();
    for (double x : {0.0, 1.3, 7.0}) EXPECT_EQ(v.B(x).norm(), 0.0);
}

TEST(EvolveB, SingleNodeClosedForm) {
    const Vessel v = fixtures::rank1();
    for (double x : {0.0, 0.37, 1.0, 2.5, 6.0, 9.99})
        EXPECT_LT((v.B(x) - oracles::rank1_B(x)).norm(), 1e-9) << x;
    CMatrix expect(1, 2);
    expect << 0.0, -kI;
    EXPECT_LT((v.B(M_PI / 2) - expect).norm(), 1e-9);
}

TEST(EvolveB, DirectIntegrationAgreesWithCache) {
    const Vessel v = fixtures::diag2();
    EXPECT_LT((evolve_B(v, 3.3, 4000) - v.B(3.3)).norm(), 1e-9);
}

TEST(EvolveB, ScaledNodeClosedForm) {
    const Vessel v = fixtures::rank1(2.0, 10.0);
    for (double x : {0.5, 2.0, 4.0}) EXPECT_LT((v.B(x) - oracles::rank1_B(x, 2.0)).norm(), 1e-8) << x;
}

TEST(EvolveX, ClosedForms) {
    const Vessel z = fixtures::zero();
    EXPECT_EQ((z.X(4.0) - z.X0()).norm(), 0.0);
    const Vessel v = fixtures::rank1();
    EXPECT_NEAR(v.X(M_PI)(0, 0).real(), 1.0 + M_PI / 2.0, 1e-9);
    for (double x : {0.5, 3.0, 8.0}) EXPECT_NEAR(std::abs(v.X(x)(0, 0) - oracles::rank1_tau(x)), 0.0, 1e-9);
    const Vessel d = fixtures::diag2();
    for (double x : {0.0, 0.8, 2.0, 7.5}) EXPECT_LT((d.X(x) - oracles::diag2_X(x)).norm(), 1e-9) << x;
}

TEST(Construction, GammaStarAtBasePoint) {
    const Vessel v = fixtures::rank1();
    CMatrix g(2, 2);
    g << 0.0, 1.0, -1.0, kI;
    EXPECT_LT((v.gamma_star(0.0) - g).norm(), 1e-12);
}

TEST(Construction, ZeroVesselKeepsGamma) {
    const Vessel v = fixtures::zero();
    for (double x : {0.0, 5.0}) {
        EXPECT_EQ((v.gamma_star(x) - v.gamma(x)).norm(), 0.0);
        EXPECT_EQ((v.X(x) - v.X0()).norm(), 0.0);
    }
}

TEST(Construction, DiagonalLyapunovForcesDiagonalX0) {
    const Vessel v = fixtures::diag2();
    const CMatrix r = v.A() * v.X0() + v.X0() * v.A().adjoint() + v.B0() * v.sigma1(0) * v.B0().adjoint();
    EXPECT_EQ(r.norm(), 0.0);
    CMatrix X0 = identity(2);
    X0(0, 1) = X0(1, 0) = 0.1;
    EXPECT_THROW(standard_construction(sl_parameters({0, 1}), v.A(), v.B0(), X0, 0.0, {}), PreconditionError);
}

TEST(Construction, PreconditionCarriesResidual) {
    CMatrix A(1, 1);
    A(0, 0) = Complex(1.0, 1.0);
    try {
        standard_construction(sl_parameters({0, 1}), A, row({1.0, 0.0}), identity(1), 0.0, {});
        FAIL() << "expected PreconditionError";
    } catch (const PreconditionError& e) {
        EXPECT_NEAR(e.residual, 2.0, 1e-12);
    }
}

TEST(Construction, BadShapesRejected) {
    EXPECT_THROW(standard_construction(sl_parameters({0, 1}), identity(2), row({1.0, 0.0}), identity(2), 0.0, {}),
                 ArgumentError);
    CMatrix A(1, 1);
    A(0, 0) = kI;
    EXPECT_THROW(standard_construction(sl_parameters({0, 1}), A, row({1.0, 0.0}), identity(1), 2.0, {}), ArgumentError);
}

TEST(Construction, IndefiniteX0Truncates) {
    const Vessel v = fixtures::indefinite();
    EXPECT_TRUE(v.truncated());
    EXPECT_FALSE(v.warnings().empty());
    EXPECT_GT(v.x_max(), 2.0);
    EXPECT_LT(v.x_max(), 3.0);
    EXPECT_THROW(v.B(v.x_max() + 0.5), IntervalError);
    EXPECT_NO_THROW(v.B(v.x_max()));
}

TEST(Construction, DomainErrors) {
    const Vessel v = fixtures::rank1(1.0, 5.0);
    EXPECT_THROW(v.B(-0.1), DomainError);
    EXPECT_THROW(v.X(5.5), DomainError);
}

TEST(Residuals, SingleNode) {
    const Vessel v = fixtures::rank1();
    EXPECT_LE(vessel_residuals(v, 0.0).max(), 1e-10);
    EXPECT_LE(vessel_residuals(v, 3.0).max(), 1e-6);
}

TEST(Residuals, ZeroVesselExact) {
    const Vessel v = fixtures::zero();
    for (double x : {0.0, 2.0, 10.0}) EXPECT_EQ(vessel_residuals(v, x).max(), 0.0);
}

TEST(Residuals, OtherFamilies) {
    for (const Vessel& v : {fixtures::nls(), fixtures::nls4(), fixtures::canonical()})
        for (double x : linspace(0.0, std::min(v.x_max(), 2.0), 5))
            EXPECT_LE(vessel_residuals(v, x).max(), 1e-6) << to_string(v.family()) << " x=" << x;
}

TEST(Residuals, RandomDissipativeVesselsStayDissipative) {
    for (std::uint64_t seed = 1; seed <= 4; ++seed) {
        const Vessel v = random_diagonal_vessel(seed, 3, 6.0);
        for (double x : linspace(0.0, 6.0, 7)) {
            EXPECT_LE(vessel_residuals(v, x).max(), 1e-6) << "seed " << seed << " x=" << x;
            EXPECT_TRUE(is_hermitian(v.X(x), 1e-12));
        }
        const auto c = classify(v);
        EXPECT_TRUE(c.dissipative);
        // X' = B sigma2 B^* >= 0, so X is monotone
        EXPECT_GE(min_hermitian_eigenvalue(v.X(5.0) - v.X(2.0)), -1e-10);
    }
}

TEST(Classify, Examples) {
    const auto r = classify(fixtures::rank1());
    EXPECT_TRUE(r.dissipative);
    EXPECT_TRUE(r.minimal);
    EXPECT_NEAR(r.m_A, 1.0, 1e-14);
    EXPECT_FALSE(classify(fixtures::zero()).minimal);
    const auto d = classify(fixtures::diag2());
    EXPECT_TRUE(d.minimal);
    EXPECT_NEAR(d.m_A, 4.0, 1e-14);
    const auto ind = classify(fixtures::indefinite());
    EXPECT_FALSE(ind.dissipative);
    EXPECT_EQ(ind.negative_squares.front(), 1);
}

TEST(Normalize, Examples) {
    const Vessel r = normalize_X0(fixtures::rank1());
    EXPECT_LT((r.X0() - identity(1)).norm(), 1e-15);
    EXPECT_LT((r.B0() - row({1.0, 0.0})).norm(), 1e-15);

    CMatrix A(1, 1), X0(1, 1);
    A(0, 0) = kI;
    X0(0, 0) = 4.0;
    const Vessel v = standard_construction(sl_parameters({0, 1}), A, row({2.0, 0.0}), X0, 0.0, {});
    const Vessel n = normalize_X0(v);
    EXPECT_LT((n.A() - A).norm(), 1e-15);
    EXPECT_LT((n.B0() - row({1.0, 0.0})).norm(), 1e-15);
    EXPECT_LT((n.X0() - identity(1)).norm(), 1e-15);

    const Vessel d = normalize_X0(fixtures::diag2(1.0, 9.0));
    EXPECT_NEAR(std::abs(d.B0()(0, 0)), 1.0, 1e-14);
    EXPECT_NEAR(std::abs(d.B0()(1, 0)), 1.0 / 3.0, 1e-14);
    EXPECT_THROW(normalize_X0(fixtures::indefinite()), PreconditionError);
}

TEST(Normalize, PreservesTransferData) {
    const Vessel v = fixtures::diag2(1.0, 9.0, 5.0);
    const Vessel n = normalize_X0(v);
    for (double x : {0.0, 1.0, 3.0}) {
        const CMatrix m1 = v.moment(x), m2 = n.moment(x);
        EXPECT_LT((m1 - m2).norm(), 1e-9) << x;
    }
}

TEST(Moment, AnalyticDerivativeMatchesDifferences) {
    const Vessel v = fixtures::diag2();
    const double h = 1e-3;
    for (double x : {0.5, 2.0, 4.0}) {
        const CMatrix fd = (v.moment(x - 2 * h) - 8.0 * v.moment(x - h) + 8.0 * v.moment(x + h) - v.moment(x + 2 * h)) /
                           (12 * h);
        EXPECT_LT((fd - v.moment_derivative(x)).norm(), 1e-7) << x;
    }
}
