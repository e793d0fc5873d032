#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "vessel_lab/numerics.hpp"

using namespace vessel_lab;

namespace {

CMatrix sl_generator(Complex lambda) {
    CMatrix c(2, 2);
    c << 0.0, kI, lambda, 0.0;
    return c;
}

CMatrix random_matrix(Eigen::Index n, std::mt19937_64& g) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    CMatrix m(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) m(i, j) = Complex(u(g), u(g));
    return m;
}

}  // namespace

TEST(Fundamental, ZeroGeneratorGivesIdentity) {
    const CMatrix phi = fundamental_solution([](double) { return CMatrix::Zero(3, 3); }, 0.0, 2.7, 50);
    EXPECT_EQ((phi - identity(3)).norm(), 0.0);
}

TEST(Fundamental, ScalarExponential) {
    const CMatrix phi = fundamental_solution([](double) { return identity(1); }, 0.0, 1.0, 10000);
    EXPECT_NEAR(std::abs(phi(0, 0) - std::exp(1.0)), 0.0, 1e-10);
}

TEST(Fundamental, SlGeneratorAtLambdaI) {
    const CMatrix phi = fundamental_solution([](double) { return sl_generator(kI); }, 0.0, 1.0, 256);
    CMatrix expect(2, 2);
    expect << std::cos(1.0), kI * std::sin(1.0), kI * std::sin(1.0), std::cos(1.0);
    EXPECT_LT((phi - expect).norm(), 1e-8);
    EXPECT_LT((phi - oracles::peano_baker_constant(sl_generator(kI), 1.0)).norm(), 1e-8);
}

TEST(Fundamental, VariableGeneratorMatchesPeanoBaker) {
    auto coeff = [](double t) {
        CMatrix c(2, 2);
        c << 0.0, Complex(0.0, t), Complex(1.0, 0.5 * t), Complex(-0.2, 0.0);
        return c;
    };
    const CMatrix phi = fundamental_solution(coeff, 0.0, 1.5, 600);
    EXPECT_LT((phi - oracles::peano_baker(coeff, 1.5)).norm(), 1e-6);
}

TEST(Fundamental, ZeroStepsRejected) {
    EXPECT_THROW(fundamental_solution([](double) { return identity(2); }, 0.0, 1.0, 0), ArgumentError);
}

TEST(Fundamental, NonFiniteRaises) {
    EXPECT_THROW(fundamental_solution([](double) { return CMatrix::Constant(1, 1, 1e300); }, 0.0, 10.0, 10),
                 IntegrationError);
}

TEST(Fundamental, DeterminantFollowsTrace) {
    // Liouville: det Phi = exp(int tr C)
    std::mt19937_64 g(3);
    for (int trial = 0; trial < 5; ++trial) {
        const CMatrix c = random_matrix(3, g);
        const CMatrix phi = fundamental_solution([&](double) { return c; }, 0.0, 0.8, 400);
        EXPECT_LT(std::abs(phi.determinant() - std::exp(0.8 * c.trace())), 1e-8);
    }
}

TEST(LogDet, Examples) {
    EXPECT_EQ(std::abs(log_det(identity(4))), 0.0);
    CMatrix d = CMatrix::Zero(2, 2);
    d(0, 0) = 2.0;
    d(1, 1) = 3.0;
    EXPECT_NEAR(log_det(d).real(), std::log(6.0), 1e-14);
    CMatrix t(1, 1);
    t(0, 0) = oracles::rank1_tau(2.0);
    EXPECT_NEAR(log_det(t).real(), std::log(2.0 + std::sin(4.0) / 4.0), 1e-14);
    EXPECT_NEAR(std::exp(log_det(t).real()), 1.81080, 1e-5);
}

TEST(LogDet, NegativeDeterminantHasPiImaginaryPart) {
    CMatrix d = CMatrix::Identity(2, 2);
    d(0, 0) = -1.0;
    EXPECT_NEAR(log_det(d).imag(), M_PI, 1e-14);
}

TEST(LogDet, SingularRaises) {
    CMatrix s(2, 2);
    s << 1.0, 2.0, 2.0, 4.0;
    EXPECT_THROW(log_det(s), SingularityError);
}

TEST(LogDet, AgreesWithDeterminant) {
    std::mt19937_64 g(9);
    for (int trial = 0; trial < 10; ++trial) {
        const CMatrix m = random_matrix(4, g);
        const Complex ld = log_det(m);
        EXPECT_LT(std::abs(std::exp(ld) - m.determinant()), 1e-10 * std::abs(m.determinant()));
    }
}

TEST(Gauss, SmallRules) {
    const auto r1 = gauss_legendre(1, -1.0, 1.0);
    EXPECT_NEAR(r1.nodes[0], 0.0, 1e-15);
    EXPECT_NEAR(r1.weights[0], 2.0, 1e-15);
    const auto r2 = gauss_legendre(2, -1.0, 1.0);
    const auto ref = oracles::gauss2_nodes();
    EXPECT_NEAR(r2.nodes[0], ref[0], 1e-15);
    EXPECT_NEAR(r2.nodes[1], ref[1], 1e-15);
    EXPECT_NEAR(r2.weights[0], 1.0, 1e-15);
    EXPECT_NEAR(r2.weights[1], 1.0, 1e-15);
}

TEST(Gauss, SquareOnOneTwo) {
    const auto r = gauss_legendre(2, 1.0, 2.0);
    double s = 0;
    for (std::size_t i = 0; i < 2; ++i) s += r.weights[i] * r.nodes[i] * r.nodes[i];
    EXPECT_NEAR(s, 7.0 / 3.0, 1e-14);
}

TEST(Gauss, ExactForDegreeTwoNMinusOne) {
    for (std::size_t n = 1; n <= 12; ++n) {
        const auto r = gauss_legendre(n, -0.5, 1.5);
        for (std::size_t p = 0; p < 2 * n; ++p) {
            double s = 0;
            for (std::size_t i = 0; i < n; ++i) s += r.weights[i] * std::pow(r.nodes[i], static_cast<double>(p));
            const double exact = (std::pow(1.5, p + 1.0) - std::pow(-0.5, p + 1.0)) / (p + 1.0);
            EXPECT_NEAR(s, exact, 1e-12 * std::max(1.0, std::abs(exact))) << "n=" << n << " p=" << p;
        }
    }
}

TEST(Lyapunov, SolvesAndRejectsSingular) {
    std::mt19937_64 g(5);
    CMatrix a = random_matrix(3, g);
    a -= 3.0 * identity(3);
    const CMatrix c = hermitian_part(random_matrix(3, g));
    const CMatrix x = solve_lyapunov(a, c);
    EXPECT_LT((a * x + x * a.adjoint() + c).norm(), 1e-12);
    CMatrix bad = CMatrix::Zero(2, 2);
    bad(0, 0) = kI;
    bad(1, 1) = 2.0 * kI;
    EXPECT_THROW(solve_lyapunov(bad, identity(2)), SingularityError);
}

TEST(Spectral, KrylovRank) {
    CMatrix a = CMatrix::Zero(2, 2);
    a(0, 0) = kI;
    a(1, 1) = 4.0 * kI;
    CMatrix b = CMatrix::Zero(2, 2);
    b(0, 0) = 1.0;
    b(1, 0) = 1.0;
    EXPECT_EQ(krylov_rank(a, b), 2u);
    EXPECT_EQ(krylov_rank(a, CMatrix::Zero(2, 2)), 0u);
    CMatrix b1 = CMatrix::Zero(2, 2);
    b1(0, 0) = 1.0;
    EXPECT_EQ(krylov_rank(a, b1), 1u);
}

TEST(Spectral, HermitianSqrt) {
    std::mt19937_64 g(1);
    const CMatrix m = random_matrix(3, g);
    const CMatrix p = m * m.adjoint() + identity(3);
    const CMatrix r = hermitian_sqrt(p);
    EXPECT_LT((r * r - p).norm(), 1e-12);
    EXPECT_TRUE(is_hermitian(r, 1e-12));
    EXPECT_GT(min_hermitian_eigenvalue(r), 0.0);
}

TEST(Stencils, DerivativesOfSine) {
    const double h = 1.0 / 256.0;
    auto f = [](double t) { return std::sin(t); };
    for (double x : {0.0, h, 0.5, 1.0 - h, 1.0}) {
        EXPECT_NEAR(derivative(f, x, h, 0.0, 1.0), std::cos(x), 1e-9) << x;
        EXPECT_NEAR(second_derivative(f, x, h, 0.0, 1.0), -std::sin(x), 1e-6) << x;
    }
}

TEST(Grid, Linspace) {
    const auto xs = linspace(0.0, 1.0, 5);
    ASSERT_EQ(xs.size(), 5u);
    EXPECT_EQ(xs.front(), 0.0);
    EXPECT_EQ(xs.back(), 1.0);
    EXPECT_EQ(linspace(2.0, 3.0, 1).front(), 2.0);
}
