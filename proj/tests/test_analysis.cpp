#include <gtest/gtest.h>

#include <cmath>

#include "mlsd/analysis.hpp"

using namespace mlsd;

TEST(Gamma, KnownValues) {
    EXPECT_NEAR(gamma_k(1), 1.0 - 1.0 / std::exp(1.0), 1e-12);
    EXPECT_NEAR(gamma_k(2), 1.0 - 2.0 / std::exp(2.0), 1e-12);
    EXPECT_NEAR(gamma_k(3), 1.0 - 4.5 / std::exp(3.0), 1e-12);
    EXPECT_THROW(gamma_k(0), std::invalid_argument);
}

TEST(Gamma, IncreasesTowardStirlingForm) {
    double prev = 0.0;
    for (std::size_t k = 1; k <= 200; ++k) {
        const double g = gamma_k(k);
        EXPECT_GT(g, prev);
        EXPECT_LT(g, 1.0);
        prev = g;
    }
    EXPECT_LT(std::abs(gamma_k(100) - gamma_k_stirling(100)), 1e-4);
    EXPECT_LT(std::abs(gamma_k(1000) - gamma_k_stirling(1000)), 1e-5);
}

TEST(MeanSe, Basics) {
    const MeanSe s = mean_se({1.0, 2.0, 3.0, 4.0});
    EXPECT_DOUBLE_EQ(s.mean, 2.5);
    EXPECT_NEAR(s.se, std::sqrt(5.0 / 3.0 / 4.0), 1e-12);
    EXPECT_EQ(mean_se({}).count, 0u);
    EXPECT_EQ(mean_se({7.0}).se, 0.0);
}

TEST(BinomialMinRatio, MatchesDirectSum) {
    // n = 3, p = 0.5, k = 2: E[min(X,2)] = (3*1 + 3*2 + 1*2)/8 = 11/8
    EXPECT_NEAR(binomial_min_ratio(3, 0.5, 2), 11.0 / 16.0, 1e-12);
    EXPECT_NEAR(binomial_min_ratio(5, 0.2, 1), 1.0 - std::pow(0.8, 5), 1e-12);
}

TEST(TightInstance, Shape) {
    const Instance inst = make_tight_instance(2, 3);
    EXPECT_EQ(inst.n(), 6u);
    EXPECT_EQ(inst.k(), 2u);
    EXPECT_EQ(inst.table(0)(2), 0.0);
    EXPECT_EQ(inst.table(5)(3), 1.0);
    EXPECT_THROW(make_tight_instance(0, 3), std::invalid_argument);
}

TEST(Tightness, MEqualsOneHasFullRatio) {
    const ExperimentReport r = tightness_experiment(1, 1, 200, 10, 1);
    EXPECT_NEAR(r.extras.at("lp_objective"), 0.5, 1e-9);
    EXPECT_GE(r.mean, 0.0);
    EXPECT_LE(r.mean, 1.0);
}

TEST(Tightness, ApproachesBinomialReference) {
    const ExperimentReport r = tightness_experiment(1, 20, 4000, 60, 11);
    EXPECT_NEAR(r.mean, r.extras.at("binomial_reference"), 4.0 * r.se + 0.01);
    EXPECT_NEAR(r.extras.at("candidate_probability"), 1.0 / 21.0, 1e-9);
}

TEST(Approximation, ZeroPayoffsPass) {
    const Instance inst = Instance::from_rows(1, -1, 1, {{0.0, 0.0}, {0.0, 0.0}});
    const ExperimentReport r = approximation_experiment(inst, 0.5, 50, 5, 1);
    EXPECT_EQ(r.mean, 0.0);
    EXPECT_TRUE(r.pass);
    EXPECT_EQ(r.ratio, 1.0);
}

TEST(Approximation, RandomInstanceMeetsGuarantee) {
    Rng rng = make_stream(61, Stream::Instance);
    const Instance inst = random_monotone_instance(4, 2, -2, 3, rng);
    const ExperimentReport r = approximation_experiment(inst, 0.5, 400, 50, 3);
    EXPECT_TRUE(r.pass) << r.mean << " vs " << r.target;
    EXPECT_EQ(r.extras.at("domination_violations"), 0.0);
    EXPECT_LE(r.extras.at("max_played"), 2.0);
    EXPECT_GE(r.mean, r.extras.at("virtual_mean") - 1e-12);
}

TEST(Approximation, RejectsShortHorizon) {
    Rng rng = make_stream(62, Stream::Instance);
    const Instance inst = random_monotone_instance(2, 1, -2, 5, rng);
    EXPECT_THROW(approximation_experiment(inst, 0.5, 3, 2, 1), std::invalid_argument);
}
