#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "vessel_lab/fixtures.hpp"
#include "vessel_lab/sturm_liouville.hpp"

using namespace vessel_lab;

TEST(PhiInput, Examples) {
    CMatrix m0(2, 2);
    m0 << 1.0, kI * 0.8, 0.0, 1.0;
    EXPECT_LT((phi_input(0.0, 1.3, 0.5) - m0).norm(), 1e-14);
    CMatrix m1(2, 2);
    m1 << 0.0, kI, kI, 0.0;
    EXPECT_LT((phi_input(kI, M_PI / 2, 0.0) - m1).norm(), 1e-14);
}

TEST(PhiInput, UnitDeterminantAndSeriesAgreement) {
    std::mt19937_64 g(17);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    for (int k = 0; k < 20; ++k) {
        const Complex l(u(g), u(g));
        const double x = std::abs(u(g));
        const CMatrix p = phi_input(l, x, 0.0);
        EXPECT_LT(std::abs(p.determinant() - 1.0), 1e-9);
        CMatrix c(2, 2);
        c << 0.0, kI, l, 0.0;
        EXPECT_LT((p - oracles::peano_baker_constant(c, x, 80)).norm(), 1e-9 * std::max(1.0, p.norm()));
    }
    EXPECT_LT((phi_input(Complex(1e-12, 0), 2.0, 0.0) - phi_input(0.0, 2.0, 0.0)).norm(), 1e-10);
}

TEST(SpectralVariable, Branch) {
    for (Complex l : {Complex(1, 2), Complex(-3, 0.1), Complex(0, -4), Complex(2, -2)}) {
        const Complex s = sl_s(l);
        EXPECT_GE(s.imag(), 0.0);
        EXPECT_LT(std::abs(sl_lambda(s) - l), 1e-12);
    }
}

TEST(GelfandLevitan, SingleNodeKernels) {
    const GLKernels k(fixtures::rank1());
    EXPECT_NEAR(std::abs(k.Omega(0, 0) - 1.0), 0.0, 1e-14);
    EXPECT_NEAR(std::abs(k.K(0, 0) + 1.0), 0.0, 1e-14);
    for (auto [x, y] : {std::pair{1.0, 0.3}, std::pair{4.0, 2.5}}) {
        EXPECT_NEAR(std::abs(k.Omega(x, y) - std::cos(x) * std::cos(y)), 0.0, 1e-9);
        EXPECT_NEAR(std::abs(k.K(x, y) + std::cos(x) * std::cos(y) / oracles::rank1_tau(x)), 0.0, 1e-9);
    }
}

TEST(GelfandLevitan, Residuals) {
    EXPECT_LE(gl_residual(GLKernels(fixtures::rank1()), 2.0, 1.0, 32), 1e-9);
    EXPECT_EQ(gl_residual(GLKernels(fixtures::zero()), 2.0, 1.0, 32), 0.0);
    EXPECT_LE(gl_residual(GLKernels(fixtures::diag2()), 1.0, 0.5, 32), 1e-7);
    EXPECT_THROW(gl_residual(GLKernels(fixtures::rank1()), 1.0, 2.0, 16), ArgumentError);
    EXPECT_THROW(GLKernels(fixtures::nls()), FamilyError);
}

TEST(GelfandLevitan, PotentialFromKernel) {
    const GLKernels k(fixtures::rank1());
    EXPECT_NEAR(q_from_K(k, 0.0), 2.0, 1e-8);
    EXPECT_NEAR(q_from_K(k, 3.0), potential_at(k.vessel(), 3.0), 1e-5);
    EXPECT_EQ(q_from_K(GLKernels(fixtures::zero()), 1.0), 0.0);
}

TEST(Jost, SingleNodeAtBasePoint) {
    const Vessel v = fixtures::rank1();
    for (Complex s : {Complex(0.3, 2.0), Complex(-0.5, 1.7)})
        EXPECT_LT(std::abs(jost_h_value(v, s, 0.0) - (1.0 + kI * s / (s * s - 1.0))), 1e-13);
    const auto z = jost_h(fixtures::zero(), Complex(0.3, 2.0), 2.0);
    EXPECT_LT(std::abs(z.h - 1.0), 1e-15);
    EXPECT_EQ(z.theta_h, 0.0);
}

TEST(Jost, Identities) {
    const Vessel v = fixtures::rank1();
    EXPECT_LE(check_h_identities(v, Complex(0.3, 2.0), 1.0).part1, 1e-7);
    const auto r = check_h_identities(v, Complex(0.2, 1.8), 1.0);
    EXPECT_LE(r.part1, 1e-5);
    EXPECT_LE(r.part2, 1e-5);
    EXPECT_LE(r.part3, 1e-5);
    EXPECT_LE(check_h_identities(v, Complex(0.0, 2.0), 2.0).part3, 1e-5);
    const auto z = check_h_identities(fixtures::zero(), Complex(0.4, 1.5), 1.0);
    EXPECT_LE(std::max({z.part1, z.part2, z.part3}), 1e-12);
}

TEST(Jost, PurelyImaginaryFreezesPhase) {
    const Vessel v = fixtures::rank1();
    const auto rows = jost_sweep(v, Complex(0.0, 2.0), linspace(0.0, 6.0, 13));
    for (const auto& r : rows) EXPECT_NEAR(r.theta_h, rows.front().theta_h, 1e-6);
}

TEST(Jost, CommutingFactorKeepsPhaseRate) {
    const Vessel v = fixtures::diag2();
    const Complex s(0.4, 4.8);
    const RightFactor y = [](Complex l) { return sl_commuting_factor(l); };
    std::vector<double> ratios;
    for (double x : {0.5, 2.0, 5.0}) {
        const auto [t0, h0] = jost_phase_rate(v, s, x);
        const auto [t1, h1] = jost_phase_rate(v, s, x, y);
        EXPECT_NEAR(t0, t1, 1e-6);
        ratios.push_back(h1 / h0);
    }
    EXPECT_NEAR(ratios[0], ratios[2], 1e-6 * std::abs(ratios[0]));
}

TEST(JostPhi, Examples) {
    const Vessel z = fixtures::zero();
    for (double x : {0.5, 2.0}) EXPECT_LT(std::abs(jost_phi(z, kI, x) - std::sin(x)), 1e-9);
    for (const Vessel& v : {fixtures::rank1(), fixtures::diag2()}) {
        const auto p = jost_phi_profile(v, Complex(0.3, 1.1), {0.0});
        EXPECT_EQ(p.phi[0], Complex(0.0));
        EXPECT_LE(std::abs(p.dphi[0] - 1.0), 1e-9);
    }
    const Vessel v = fixtures::rank1();
    const Complex l(0.0, 4.0);
    const double h = v.step();
    auto phi = [&](double t) { return jost_phi(v, l, t); };
    const Complex d2 = (-phi(1 - 2 * h) + 16.0 * phi(1 - h) - 30.0 * phi(1) + 16.0 * phi(1 + h) - phi(1 + 2 * h)) / (12 * h * h);
    EXPECT_LE(std::abs(-d2 + potential_at(v, 1.0) * phi(1) + kI * l * phi(1)), 1e-5);
}

TEST(Volterra, FreeCase) {
    const auto o = volterra_jost_oracle([](double) { return 0.0; }, Complex(0.5, 1.0), 5.0, 3);
    EXPECT_EQ(o.iterations, 1u);
    for (double x : {0.0, 1.3, 5.0}) EXPECT_LT(std::abs(o(x) - std::exp(kI * Complex(0.5, 1.0) * x)), 1e-14);
}

TEST(Volterra, SingleNodePotential) {
    const auto q = [](double x) { return oracles::rank1_q(x); };
    const Complex s(0.0, 2.0);
    const auto o = volterra_jost_oracle(q, s, 40.0, 200);
    double worst = 0;
    for (std::size_t i = 0; i < o.x.size() && o.x[i] <= 30.0; ++i) worst = std::max(worst, oracle_ode_residual(o, q, i));
    EXPECT_LE(worst, 1e-4);
    EXPECT_LT(std::abs(o.g_at(30.0) - 1.0), 2e-2);
}

TEST(Volterra, Errors) {
    const auto q = [](double x) { return oracles::rank1_q(x); };
    EXPECT_THROW(volterra_jost_oracle(q, Complex(1.0, 0.0), 10.0, 20), ArgumentError);
    EXPECT_THROW(volterra_jost_oracle(q, Complex(0.0, 2.0), 10.0, 1), ConvergenceError);
}

TEST(Sweep, RowsAreContinuous) {
    const auto rows = jost_sweep(fixtures::rank1(), Complex(0.3, 2.0), linspace(0.0, 10.0, 201));
    for (std::size_t i = 1; i < rows.size(); ++i) {
        EXPECT_LT(std::abs(rows[i].theta_h - rows[i - 1].theta_h), 0.5);
        EXPECT_TRUE(std::isfinite(rows[i].K_S));
    }
}
