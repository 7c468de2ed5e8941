#include <gtest/gtest.h>

#include "mlsd/analysis.hpp"
#include "mlsd/lp_relaxation.hpp"
#include "mlsd/oracle.hpp"
#include "mlsd/rng.hpp"
#include "support/lp_dual.hpp"

using namespace mlsd;

TEST(BuildLp, Shape) {
    const Instance inst = Instance::from_rows(1, -2, 2, {{0.1, 0.2, 0.3, 0.4}});
    const LpDescription d = build_lp(inst, -2);
    EXPECT_EQ(d.lp.columns(), 4u);
    EXPECT_EQ(d.lp.constraints(), 2u);
    EXPECT_EQ(d.lp.rhs, (std::vector<double>{1.0, 1.0}));
    EXPECT_THROW(build_lp(inst, 0), std::invalid_argument);
}

TEST(BuildLp, Coefficients) {
    Rng rng = make_stream(21, Stream::Instance);
    const Instance inst = random_monotone_instance(3, 2, -3, 3, rng);
    const LpDescription d = build_lp(inst, -3);
    EXPECT_EQ(d.grid.size(), 3u * 3u * 3u);
    EXPECT_EQ(d.lp.rhs[0], 2.0);
    d.grid.for_each([&](std::size_t j, ArmIndex arm, int u, int l) {
        EXPECT_EQ(j, d.grid.index(arm, u, l));
        if (l == -1) {
            EXPECT_EQ(d.lp.objective[j], inst.table(arm)(u));
        }
        EXPECT_EQ(d.lp.rows[0][j], -l);
        for (ArmIndex other = 0; other < 3; ++other)
            EXPECT_EQ(d.lp.rows[1 + other][j], other == arm ? u - l : 0);
    });
}

TEST(SolveLp, SingleArmValue) {
    const LpSolution x = solve_lp(build_lp(make_single_arm_instance(), -2));
    EXPECT_NEAR(x.objective, 2.0 / 3.0, 1e-9);
    EXPECT_NEAR(x(0, 1, -2), 1.0 / 3.0, 1e-9);
    EXPECT_NEAR(x(0, 1, -1), 0.0, 1e-12);
}

TEST(SolveLp, ZeroPayoffs) {
    const Instance inst = Instance::from_rows(1, -2, 2, {{0, 0, 0, 0}, {0, 0, 0, 0}});
    EXPECT_EQ(solve_lp(build_lp(inst, -2)).objective, 0.0);
}

// Threshold instance k=1, m=3: every arm holds I(3,-1) with x = 1/4, giving
// LP* = 3/4 (the budget row is slack at 3/4).
TEST(SolveLp, ThresholdInstance) {
    const Instance inst = make_tight_instance(1, 3);
    const LpSolution x = solve_lp(build_lp(inst, -1));
    EXPECT_NEAR(x.objective, 0.75, 1e-9);
    for (ArmIndex i = 0; i < 3; ++i) EXPECT_NEAR(x(i, 3, -1), 0.25, 1e-9);
    EXPECT_NEAR(x.objective, mlsd::testing::lp_value_by_duality(inst, -1), 1e-9);
}

TEST(SolveLp, MatchesDualOracle) {
    Rng rng = make_stream(22, Stream::Instance);
    for (int trial = 0; trial < 300; ++trial) {
        const std::size_t n = 1 + uniform_below(rng, 4);
        const std::size_t k = 1 + uniform_below(rng, n);
        const int tau_max = 1 + static_cast<int>(uniform_below(rng, 4));
        const int tau_min = -1 - static_cast<int>(uniform_below(rng, 4));
        const int tau_L = -1 - static_cast<int>(uniform_below(rng, 5));
        const Instance inst = random_monotone_instance(n, k, tau_min, tau_max, rng);
        const LpSolution x = solve_lp(build_lp(inst, tau_L));
        EXPECT_NEAR(x.objective, mlsd::testing::lp_value_by_duality(inst, tau_L), 1e-6) << "trial " << trial;
        const FeasibilityReport f = check_feasible(x, inst, 1e-8);
        EXPECT_TRUE(f.feasible) << f.max_violation;
        EXPECT_LE(x.objective, static_cast<double>(k) + 1e-9);
    }
}

TEST(SolveLp, MonotoneInPayoffs) {
    Rng rng = make_stream(23, Stream::Instance);
    for (int trial = 0; trial < 100; ++trial) {
        const Instance inst = random_monotone_instance(3, 1, -2, 3, rng);
        std::vector<std::vector<double>> rows;
        for (const auto& t : inst.tables()) rows.emplace_back(t.values().begin(), t.values().end());
        const std::size_t arm = uniform_below(rng, 3);
        const std::size_t entry = uniform_below(rng, rows[arm].size());
        rows[arm][entry] = std::min(1.0, rows[arm][entry] + 0.2);
        const Instance bumped = Instance::from_rows(1, -2, 3, rows, Monotonicity::NotRequired);
        EXPECT_GE(solve_lp(build_lp(bumped, -2)).objective, solve_lp(build_lp(inst, -2)).objective - 1e-9);
    }
}

TEST(SolveLp, ScalingOneArmScalesItsContribution) {
    // A single arm with k = 1: scaling its table scales LP* exactly.
    Rng rng = make_stream(24, Stream::Instance);
    const Instance inst = random_monotone_instance(1, 1, -3, 3, rng);
    std::vector<double> row(inst.table(0).values().begin(), inst.table(0).values().end());
    for (double& v : row) v *= 0.4;
    const Instance scaled = Instance::from_rows(1, -3, 3, {row});
    EXPECT_NEAR(solve_lp(build_lp(scaled, -3)).objective, 0.4 * solve_lp(build_lp(inst, -3)).objective, 1e-9);
}

TEST(CheckFeasible, Examples) {
    const Instance inst = make_single_arm_instance();
    LpSolution x;
    x.grid = IntervalGrid{1, 1, -2};
    x.x.assign(2, 0.0);
    FeasibilityReport f = check_feasible(x, inst, 1e-8);
    EXPECT_TRUE(f.feasible);
    EXPECT_EQ(f.max_violation, 0.0);
    x.x[x.grid.index(0, 1, -1)] = 1.0;
    f = check_feasible(x, inst, 1e-8);
    EXPECT_FALSE(f.feasible);
    EXPECT_NEAR(f.packing_violation, 1.0, 1e-12);
    x.x.assign(3, 0.0);
    EXPECT_THROW(check_feasible(x, inst, 1e-8), std::invalid_argument);
}

TEST(TauL, FromEpsilon) {
    EXPECT_EQ(tau_L_for_epsilon(0.5), -2);
    EXPECT_EQ(tau_L_for_epsilon(0.25), -4);
    EXPECT_EQ(tau_L_for_epsilon(0.3), -4);
    EXPECT_EQ(tau_L_for_epsilon(0.99), -2);
    EXPECT_THROW(tau_L_for_epsilon(0.0), std::invalid_argument);
    EXPECT_THROW(tau_L_for_epsilon(1.0), std::invalid_argument);
}

// T LP* >= (1 - 1/(1 - tau_L)) OPT(T) - n.
TEST(SolveLp, BoundsFiniteHorizonOptimum) {
    Rng rng = make_stream(25, Stream::Instance);
    for (int trial = 0; trial < 80; ++trial) {
        const std::size_t n = 1 + uniform_below(rng, 3);
        const std::size_t k = 1 + uniform_below(rng, n);
        const Instance inst = random_monotone_instance(n, k, -1 - static_cast<int>(uniform_below(rng, 3)),
                                                       1 + static_cast<int>(uniform_below(rng, 3)), rng);
        const int tau_L = -1 - static_cast<int>(uniform_below(rng, 2));
        const long long T = 1 + static_cast<long long>(uniform_below(rng, 15));
        const double opt = dp_optimal(inst, T, kDefaultDpBudget, false).value;
        const double lp = solve_lp(build_lp(inst, tau_L)).objective;
        EXPECT_GE(T * lp, (1.0 - 1.0 / (1.0 - tau_L)) * opt - static_cast<double>(n) - 1e-9);
    }
}

TEST(DenseSimplex, SmallTextbookProblem) {
    // max 3x + 5y s.t. x <= 4, 2y <= 12, 3x + 2y <= 18  ->  (2, 6), 36
    DenseLp lp{{3, 5}, {{1, 0}, {0, 2}, {3, 2}}, {4, 12, 18}};
    const LpResult r = DenseSimplex{}.solve(lp);
    ASSERT_EQ(r.status, LpStatus::Optimal);
    EXPECT_NEAR(r.objective, 36.0, 1e-12);
    EXPECT_NEAR(r.x[0], 2.0, 1e-12);
    EXPECT_NEAR(r.x[1], 6.0, 1e-12);
}

TEST(DenseSimplex, ReportsUnboundedAndBadInput) {
    DenseLp unbounded{{1, 1}, {{1, -1}}, {1}};
    EXPECT_EQ(DenseSimplex{}.solve(unbounded).status, LpStatus::Unbounded);
    DenseLp negative{{1}, {{1}}, {-1}};
    EXPECT_THROW(DenseSimplex{}.solve(negative), std::invalid_argument);
}

TEST(SolveLp, SolverFailureIsDistinct) {
    struct Failing {
        LpResult solve(const DenseLp&) const { return {LpStatus::IterationLimit, {}, 0.0, 0}; }
    };
    EXPECT_THROW(solve_lp(build_lp(make_single_arm_instance(), -2), Failing{}), LpSolverError);
}
