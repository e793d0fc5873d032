#include <gtest/gtest.h>

#include "oracles.hpp"
#include "vessel_lab/fixtures.hpp"
#include "vessel_lab/tau.hpp"

using namespace vessel_lab;

TEST(Tau, ClosedForms) {
    const Vessel v = fixtures::rank1();
    for (double x : {0.0, 0.5, 2.0, 7.0, 30.0}) EXPECT_NEAR(tau(v, x), oracles::rank1_tau(x), 1e-9) << x;
    EXPECT_NEAR(tau(v, M_PI), 1.0 + M_PI / 2.0, 1e-9);
    EXPECT_EQ(tau(v, 0.0), 1.0);
    for (double x : {0.0, 4.0}) EXPECT_EQ(tau(fixtures::zero(), x), 1.0);
}

TEST(Tau, TwoNodeDeterminant) {
    const Vessel v = fixtures::diag2();
    for (double x : {0.3, 1.0, 5.0, 12.0}) EXPECT_NEAR(tau(v, x), oracles::diag2_tau(x), 1e-8 * oracles::diag2_tau(x));
}

TEST(Tau, IncreasingForDissipativeVessels) {
    for (const Vessel& v : {fixtures::rank1(), fixtures::diag2()}) {
        double prev = 0.0;
        for (double x : linspace(0.0, 20.0, 81)) {
            const double t = tau(v, x);
            EXPECT_GT(t, 0.0);
            EXPECT_GE(t, prev - 1e-12);
            prev = t;
        }
    }
}

TEST(LogDerivative, Examples) {
    const Vessel v = fixtures::rank1();
    EXPECT_NEAR(tau_logderiv(v, 0.0), 1.0, 1e-12);
    EXPECT_NEAR(tau_logderiv(v, M_PI / 2), 0.0, 1e-9);
    EXPECT_EQ(tau_logderiv(fixtures::zero(), 2.0), 0.0);
    for (double x : {0.7, 3.0, 9.0})
        EXPECT_NEAR(tau_logderiv(v, x), oracles::rank1_dtau(x) / oracles::rank1_tau(x), 1e-9) << x;
}

TEST(LogDerivative, TraceFormulaMatchesDifferences) {
    const Vessel v = fixtures::diag2();
    for (double x : {0.0, 1.0, 4.0, 9.0}) EXPECT_NEAR(tau_logderiv(v, x), logderiv_by_differences(v, x), 1e-6) << x;
}

TEST(Potential, Examples) {
    const Vessel v = fixtures::rank1();
    EXPECT_NEAR(potential_at(v, 0.0), 2.0, 1e-10);
    for (double x : linspace(0.0, 10.0, 21)) EXPECT_NEAR(potential_at(v, x), oracles::rank1_q(x), 1e-6) << x;
    EXPECT_EQ(potential_at(fixtures::zero(), 3.0), 0.0);
}

TEST(Potential, TwoNodeAgainstClosedFormLogTau) {
    const Vessel v = fixtures::diag2();
    const double h = 1e-3;
    auto lt = [](double t) { return std::log(oracles::diag2_tau(t)); };
    for (double x : {0.5, 2.0, 6.0}) {
        const double d2 = (-lt(x - 2 * h) + 16 * lt(x - h) - 30 * lt(x) + 16 * lt(x + h) - lt(x + 2 * h)) / (12 * h * h);
        EXPECT_NEAR(potential_at(v, x), -2.0 * d2, 1e-5) << x;
    }
}

TEST(Potential, ProfileCrossChecks) {
    const auto p = potential(fixtures::diag2(), linspace(0.0, 10.0, 41));
    EXPECT_LE(p.max_crosscheck, 1e-5);
    ASSERT_EQ(p.q.size(), 41u);
    for (std::size_t i = 0; i < p.q.size(); ++i) EXPECT_NEAR(p.beta[i], -p.logderiv[i], 1e-15);
}

TEST(Potential, RequiresSlFamily) {
    EXPECT_THROW(potential_at(fixtures::nls(), 0.5), FamilyError);
    EXPECT_THROW(check_gamma_star_formula(fixtures::canonical(), 0.5), FamilyError);
}

TEST(GammaStarFormula, Examples) {
    const Vessel v = fixtures::rank1();
    EXPECT_LE(check_gamma_star_formula(v, 0.0), 1e-8);
    EXPECT_LE(check_gamma_star_formula(v, 2.0), 1e-6);
    EXPECT_EQ(check_gamma_star_formula(fixtures::zero(), 1.0), 0.0);
    for (double x : {0.5, 3.0}) EXPECT_LE(check_gamma_star_formula(fixtures::diag2(), x), 1e-6);
}

TEST(Bounds, LinearLowerBoundFit) {
    std::vector<double> xs, ys;
    for (double x : linspace(0.0, 10.0, 11)) {
        xs.push_back(x);
        ys.push_back(2.0 * x + 1.0 + (static_cast<int>(x) % 2 ? 0.5 : 0.0));
    }
    const auto b = fit_linear_lower_bound(xs, ys);
    for (std::size_t i = 0; i < xs.size(); ++i) EXPECT_GE(ys[i], b.slope * xs[i] + b.intercept - 1e-12);
    EXPECT_NEAR(b.slope, 2.0, 0.1);
}

TEST(Bounds, SingleNodeGrowthAndDecay) {
    const Vessel v = fixtures::rank1();
    const auto b = dissipative_bounds(v, {5.0, 50.0}, {10.0, 100.0});
    EXPECT_NEAR(b.trace_growth.slope, 0.5, 0.02);
    EXPECT_GT(b.inverse_decay.slope, 0.0);
    EXPECT_LE(b.q_times_x, 10.0);
    EXPECT_NEAR(b.max_B_norm, 1.0, 1e-8);
}
