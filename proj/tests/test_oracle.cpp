#include <gtest/gtest.h>

#include "mlsd/analysis.hpp"
#include "mlsd/oracle.hpp"

using namespace mlsd;

TEST(DpOptimal, SingleArmExamples) {
    const Instance inst = make_single_arm_instance();
    EXPECT_EQ(dp_optimal(inst, 3).value, 2.0);
    EXPECT_EQ(dp_optimal(inst, 30).value, 20.0);
    EXPECT_EQ(dp_optimal(inst, 0).value, 0.0);
    EXPECT_EQ(dp_optimal(inst, 1).value, 1.0);
}

TEST(DpOptimal, ScheduleAchievesValue) {
    Rng rng = make_stream(41, Stream::Instance);
    for (int trial = 0; trial < 50; ++trial) {
        const Instance inst = random_monotone_instance(3, 2, -2, 2, rng);
        const OracleResult r = dp_optimal(inst, 12);
        ASSERT_EQ(r.schedule.size(), 12u);
        for (const auto& played : r.schedule) ASSERT_LE(played.size(), 2u);
        EXPECT_NEAR(simulate_schedule(inst, r.schedule).total, r.value, 1e-9);
    }
}

TEST(DpOptimal, MatchesExhaustiveSearch) {
    Rng rng = make_stream(42, Stream::Instance);
    for (int trial = 0; trial < 60; ++trial) {
        const std::size_t n = 1 + uniform_below(rng, 2);
        const std::size_t k = 1 + uniform_below(rng, n);
        const Instance inst = random_monotone_instance(n, k, -1 - static_cast<int>(uniform_below(rng, 3)),
                                                       1 + static_cast<int>(uniform_below(rng, 3)), rng);
        const long long T = 1 + static_cast<long long>(uniform_below(rng, 8));
        EXPECT_NEAR(dp_optimal(inst, T).value, exhaustive_optimal(inst, T), 1e-9);
    }
}

TEST(DpOptimal, NonDecreasingInHorizon) {
    Rng rng = make_stream(43, Stream::Instance);
    const Instance inst = random_monotone_instance(3, 1, -3, 3, rng);
    double prev = 0.0;
    for (long long T = 1; T <= 25; ++T) {
        const double v = dp_optimal(inst, T, kDefaultDpBudget, false).value;
        EXPECT_GE(v, prev - 1e-12);
        EXPECT_LE(v - prev, 1.0 + 1e-12);  // one round adds at most k payoffs of 1
        prev = v;
    }
}

TEST(DpOptimal, NonDecreasingInPayoffs) {
    Rng rng = make_stream(44, Stream::Instance);
    for (int trial = 0; trial < 40; ++trial) {
        const Instance inst = random_monotone_instance(2, 1, -2, 2, rng);
        std::vector<std::vector<double>> rows;
        for (const auto& t : inst.tables()) rows.emplace_back(t.values().begin(), t.values().end());
        rows[trial % 2][uniform_below(rng, 4)] += 0.1;
        for (auto& r : rows)
            for (double& v : r) v = std::min(v, 1.0);
        const Instance bumped = Instance::from_rows(1, -2, 2, rows, Monotonicity::NotRequired);
        EXPECT_GE(dp_optimal(bumped, 10).value, dp_optimal(inst, 10).value - 1e-12);
    }
}

TEST(DpOptimal, RefusesOverBudget) {
    Rng rng = make_stream(45, Stream::Instance);
    const Instance inst = random_monotone_instance(8, 3, -4, 4, rng);
    EXPECT_THROW(dp_optimal(inst, 1000), OracleBudgetExceeded);
    EXPECT_THROW(dp_optimal(make_single_arm_instance(), 100, 10.0), OracleBudgetExceeded);
    EXPECT_THROW(exhaustive_optimal(inst, 50), OracleBudgetExceeded);
    EXPECT_THROW(dp_optimal(inst, -1), std::invalid_argument);
}

TEST(ActionSetCount, SmallValues) {
    EXPECT_EQ(action_set_count(3, 1), 4.0);
    EXPECT_EQ(action_set_count(3, 3), 8.0);
    EXPECT_EQ(action_set_count(4, 2), 11.0);
}

TEST(ArmActions, RoundTrip) {
    const Schedule s{{0, 2}, {}, {1}, {0}};
    std::vector<std::vector<Action>> per_arm;
    for (ArmIndex a = 0; a < 3; ++a) per_arm.push_back(arm_actions(s, a));
    EXPECT_EQ(per_arm[0], (std::vector<Action>{Action::Play, Action::NoPlay, Action::NoPlay, Action::Play}));
    EXPECT_EQ(schedule_from_actions(per_arm), s);
    per_arm[1].pop_back();
    EXPECT_THROW(schedule_from_actions(per_arm), std::invalid_argument);
}
