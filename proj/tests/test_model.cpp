#include <gtest/gtest.h>

#include <boost/multiprecision/cpp_dec_float.hpp>
#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include "cevlab/errors.hpp"
#include "cevlab/model.hpp"

using namespace cevlab;

namespace {

CevParams make(double k, double l, double sigma, double a, double x0 = 1.0) { return {k, l, sigma, a, x0}; }

double rel_err(double got, double want) { return std::fabs(got - want) / std::max(std::fabs(want), 1e-300); }

}  // namespace

TEST(CevParams, RejectsOutOfDomain) {
    EXPECT_NO_THROW(make(1, 1, 1, 0.75).check());
    EXPECT_THROW(make(-1, 1, 1, 0.75).check(), InvalidParams);
    EXPECT_THROW(make(1, -1, 1, 0.75).check(), InvalidParams);
    EXPECT_THROW(make(1, 1, -0.1, 0.75).check(), InvalidParams);
    EXPECT_THROW(make(1, 1, 1, 0.5).check(), InvalidParams);
    EXPECT_THROW(make(1, 1, 1, 1.0).check(), InvalidParams);
    EXPECT_THROW(make(1, 1, 1, 0.75, 0.0).check(), InvalidParams);
    EXPECT_THROW(make(1, 1, std::nan(""), 0.75).check(), InvalidParams);
    EXPECT_FALSE(make(1, 1, 1, 1.2).valid());
}

TEST(TimeGrid, EndpointIsExact) {
    for (std::size_t n : {1u, 3u, 7u, 10u, 64u, 1000u}) {
        const TimeGrid g(1.3, n);
        EXPECT_EQ(g.time(n), 1.3);
        EXPECT_EQ(g.time(0), 0.0);
        EXPECT_LE(std::fabs(g.dt() * static_cast<double>(n) - 1.3), std::numeric_limits<double>::epsilon() * 1.3);
    }
    EXPECT_THROW(TimeGrid(1.0, 0), InvalidParams);
    EXPECT_THROW(TimeGrid(0.0, 4), InvalidParams);
}

TEST(AssumptionA, FeasibleStandardConfig) {
    const auto r = validate_assumption_a(make(1, 1, 1, 0.75), 0.5);
    EXPECT_TRUE(r.feasible);
    EXPECT_TRUE(r.drift_condition_ok);
    EXPECT_TRUE(r.step_condition_ok);
    EXPECT_DOUBLE_EQ(r.max_step, 2.0 / 2.75);
    EXPECT_DOUBLE_EQ(r.margin, 0.625);
}

TEST(AssumptionA, ZeroReversionFailsDriftCondition) {
    const auto r = validate_assumption_a(make(0, 5, 2, 0.6), 0.1);
    EXPECT_FALSE(r.drift_condition_ok);
    EXPECT_FALSE(r.feasible);
    EXPECT_DOUBLE_EQ(r.margin, -1.2);
}

TEST(AssumptionA, BoundaryStepAccepted) {
    const auto r = validate_assumption_a(make(2, 1, 0, 0.75), 0.5);
    EXPECT_TRUE(r.feasible);
    EXPECT_EQ(r.max_step, 0.5);
    EXPECT_FALSE(validate_assumption_a(make(2, 1, 0, 0.75), std::nextafter(0.5, 1.0)).feasible);
}

TEST(MaxStableStep, Examples) {
    EXPECT_NEAR(max_stable_step(make(1, 1, 1, 0.75)), 0.7272727272727273, 1e-16);
    EXPECT_EQ(max_stable_step(make(0, 1, 0, 0.6)), std::numeric_limits<double>::infinity());
    EXPECT_EQ(max_stable_step(make(2, 1, 0, 0.9)), 0.5);
}

TEST(InnerValue, Examples) {
    EXPECT_NEAR(inner_value(1.0, 0.1, make(1, 1, 0.5, 0.75)).value, 0.990625, 1e-15);
    EXPECT_EQ(inner_value(0.0, 0.1, make(1, 1, 1, 0.6)).value, 0.1);
    EXPECT_NEAR(inner_value(4.0, 0.1, make(1, 1, 1, 0.75)).value, 3.625, 4e-15);
    EXPECT_FALSE(inner_value(4.0, 0.1, make(1, 1, 1, 0.75)).clamped);
}

TEST(InnerValue, RoundingNegativeIsClampedAndFlagged) {
    // l = sigma = 0 and k dt slightly above 1: inner = y (1 - k dt) ~ -1e-13.
    const auto p = make(1, 0, 0, 0.75);
    const auto r = inner_value(1.0, 1.0 + 1e-13, p);
    EXPECT_EQ(r.value, 0.0);
    EXPECT_TRUE(r.clamped);
    EXPECT_THROW((void)inner_value(1.0, 1.0 + 1e-11, p), NegativeInner);
}

TEST(InnerValue, InfeasibleStepThrows) {
    // y = 1, dt = 10: 1 (1 - 10) + 10 (1 - 0.375) = -2.75
    EXPECT_THROW((void)inner_value(1.0, 10.0, make(1, 1, 1, 0.75)), NegativeInner);
}

TEST(AnalyticMean, Examples) {
    EXPECT_DOUBLE_EQ(analytic_mean(make(1, 1, 1, 0.75, 1.0), 3.7), 1.0);
    EXPECT_DOUBLE_EQ(analytic_mean(make(0, 9, 1, 0.75, 2.0), 5.0), 2.0);
    // mpmath odefun solution of m' = 1 - m, m(0) = 2, at t = 1.
    EXPECT_NEAR(analytic_mean(make(1, 1, 1, 0.75, 2.0), 1.0), 1.3678794411714423216, 1e-15);
}

TEST(StepNegativityProb, Examples) {
    const auto p = make(1, 1, 0.5, 0.75);
    EXPECT_DOUBLE_EQ(negativity_prob_from_inner(0.0, 0.1, p), 0.5);
    // 50-digit mpmath: Phi(-25.238718976933442115).
    EXPECT_LT(rel_err(step_negativity_prob(1.0, 0.1, p), 7.5319105589255675309e-141), 1e-12);
    EXPECT_EQ(step_negativity_prob(0.3, 0.1, make(1, 1, 0, 0.75)), 0.0);
    EXPECT_EQ(step_negativity_prob(0.0, 0.5, make(1, 1, 0, 0.75)), 0.0);
}

TEST(StepNegativityProb, StandardConfigAtSixteenthStep) {
    // mpmath: Phi(-15.905414575341013303) at y = 1, dt = 1/16.
    EXPECT_LT(rel_err(step_negativity_prob(1.0, 1.0 / 16, make(1, 1, 1, 0.75)), 2.9058653956181754031e-57), 1e-12);
}

TEST(NormalCdf, Symmetry) {
    for (double x : {0.0, 0.3, 1.0, 2.5, 6.0}) EXPECT_NEAR(normal_cdf(x) + normal_cdf(-x), 1.0, 1e-15);
    EXPECT_NEAR(normal_cdf(1.959963984540054), 0.975, 1e-15);
}

// ---- properties ----------------------------------------------------------

namespace {

// Feasible parameter sets, half of them on the drift boundary k l = a sigma^2 / 2
// and stepping exactly at max_stable_step.
std::vector<std::pair<CevParams, double>> feasible_sets(std::size_t count, unsigned seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uk(0.05, 5.0), us(0.05, 3.0), ua(0.501, 0.999), uf(0.05, 1.0);
    std::vector<std::pair<CevParams, double>> out;
    for (std::size_t i = 0; i < count; ++i) {
        CevParams p;
        p.k = uk(rng);
        p.sigma = us(rng);
        p.a = ua(rng);
        const double half_a_s2 = 0.5 * p.a * p.sigma * p.sigma;
        double boundary_l = half_a_s2 / p.k;
        // Smallest representable l with k l >= a sigma^2 / 2.
        while (p.k * boundary_l < half_a_s2) boundary_l = std::nextafter(boundary_l, 1e300);
        p.l = (i % 2 == 0) ? boundary_l : boundary_l * (1.0 + 3.0 * uf(rng));
        const double dt = (i % 4 < 2) ? max_stable_step(p) : max_stable_step(p) * uf(rng);
        out.emplace_back(p, dt);
    }
    return out;
}

}  // namespace

TEST(InnerValueProperty, NonNegativeAcrossFeasibleRegion) {
    for (const auto& [p, dt] : feasible_sets(40, 7)) {
        ASSERT_TRUE(validate_assumption_a(p, dt).feasible);
        for (int i = 0; i <= 2000; ++i) {
            const double y = (i == 0) ? 0.0 : std::pow(10.0, -8.0 + 14.0 * i / 2000.0);
            const auto r = inner_value(y, dt, p);
            EXPECT_GE(r.value, 0.0);
        }
    }
}

TEST(InnerValueProperty, MatchesFiftyDigitArithmetic) {
    using Big = boost::multiprecision::cpp_dec_float_50;
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> uy(0.0, 50.0), ufrac(0.0, 0.5);
    double worst = 0.0;
    for (const auto& [p, dt_max] : feasible_sets(100, 13)) {
        const double y = uy(rng);
        const double dt = max_stable_step(p) * ufrac(rng) + 1e-6;
        const Big by(y), bdt(dt), bk(p.k), bl(p.l), bs(p.sigma), ba(p.a);
        const Big power = y == 0.0 ? Big(0) : boost::multiprecision::pow(by, 2 * ba - 1);
        const Big exact = by * (1 - bk * bdt) + bdt * (bk * bl - ba * bs * bs * power / 2);
        const double got = inner_value(y, dt, p).value;
        worst = std::max(worst, rel_err(got, exact.convert_to<double>()));
    }
    EXPECT_LE(worst, 1e-14);
}

TEST(StepNegativityProbProperty, MonotoneInInnerAndStep) {
    const auto p = make(1, 1, 1, 0.75);
    for (double dt : {1.0 / 4, 1.0 / 16, 1.0 / 64}) {
        double prev = 1.0;
        for (int i = 0; i <= 200; ++i) {
            const double inner = 1e-4 * std::pow(1.07, i);
            const double prob = negativity_prob_from_inner(inner, dt, p);
            EXPECT_LE(prob, prev);
            prev = prob;
        }
    }
    for (int i = 0; i <= 100; ++i) {
        const double inner = 1e-3 * std::pow(1.1, i);
        double prev = 0.0;
        for (double dt : {1.0 / 256, 1.0 / 64, 1.0 / 16, 1.0 / 4}) {
            const double prob = negativity_prob_from_inner(inner, dt, p);
            EXPECT_GE(prob, prev);
            prev = prob;
        }
    }
    // At fixed state, shrinking the step 4x never raises the probability.
    for (const auto& [q, dt] : feasible_sets(30, 17)) {
        for (double y : {0.0, 1e-3, 0.1, 1.0, 10.0}) {
            EXPECT_LE(step_negativity_prob(y, dt / 4, q), step_negativity_prob(y, dt, q));
        }
    }
}

TEST(AssumptionAProperty, MaxStableStepIsFeasible) {
    for (const auto& [p, dt] : feasible_sets(200, 19)) {
        EXPECT_TRUE(validate_assumption_a(p, max_stable_step(p)).feasible);
    }
}
