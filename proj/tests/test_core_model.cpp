#include <gtest/gtest.h>

#include <vector>

#include "mlsd/analysis.hpp"
#include "mlsd/core_model.hpp"
#include "mlsd/rng.hpp"

using namespace mlsd;

namespace {

std::vector<int> values(const ArmStateVector& v) {
    std::vector<int> out;
    for (State s : v) out.push_back(s.value());
    return out;
}

}  // namespace

TEST(State, RejectsZero) {
    EXPECT_THROW(State(0), std::invalid_argument);
    EXPECT_EQ(State().value(), 1);
}

TEST(Transition, PositivePlayedDropsToMinusOne) { EXPECT_EQ(transition(State(3), true), State(-1)); }

TEST(Transition, NegativeRestJumpsToOne) { EXPECT_EQ(transition(State(-2), false), State(1)); }

TEST(Transition, RunsExtend) {
    EXPECT_EQ(transition(State(-2), true), State(-3));
    EXPECT_EQ(transition(State(5), false), State(6));
    EXPECT_EQ(transition(State(1), Action::NoPlay), State(2));
}

TEST(Transition, NeverProducesZero) {
    Rng rng = make_stream(11, Stream::Sampling);
    int tau = 1;
    for (int t = 0; t < 100000; ++t) {
        tau = next_state(tau, bernoulli(rng, 0.5));
        ASSERT_NE(tau, 0);
    }
}

TEST(StateIndex, SkipsZeroAndRoundTrips) {
    EXPECT_EQ(state_count(-3, 2), 5u);
    EXPECT_EQ(state_index(-3, -3), 0u);
    EXPECT_EQ(state_index(-1, -3), 2u);
    EXPECT_EQ(state_index(1, -3), 3u);
    EXPECT_EQ(state_index(2, -3), 4u);
    for (std::size_t i = 0; i < 5; ++i) EXPECT_EQ(state_index(state_at_index(i, -3), -3), i);
}

TEST(PayoffTable, Validates) {
    EXPECT_THROW(PayoffTable({0.1, 0.2}, -2, 1), std::invalid_argument);        // wrong size
    EXPECT_THROW(PayoffTable({0.5, 0.2, 0.9}, -2, 1), std::invalid_argument);   // not monotone
    EXPECT_THROW(PayoffTable({0.1, 0.2, 1.5}, -2, 1), std::invalid_argument);   // out of range
    EXPECT_THROW(PayoffTable({0.1, 0.2, 0.3}, 0, 3), std::invalid_argument);    // bad bounds
    EXPECT_NO_THROW(PayoffTable({0.5, 0.2, 0.9}, -2, 1, Monotonicity::NotRequired));
}

TEST(Payoff, SingleArmStepValues) {
    const Instance inst = make_single_arm_instance();
    EXPECT_EQ(payoff(inst, 0, State(-1)), 1.0);
    EXPECT_EQ(payoff(inst, 0, State(-2)), 0.0);
    EXPECT_EQ(payoff(inst, 0, State(-9)), 0.0);
}

TEST(Payoff, ThresholdInstanceValues) {
    const Instance inst = make_tight_instance(1, 3);
    EXPECT_EQ(payoff(inst, 0, State(2)), 0.0);
    EXPECT_EQ(payoff(inst, 0, State(3)), 1.0);
}

TEST(Payoff, SaturatesAboveTauMax) {
    Rng rng = make_stream(5, Stream::Instance);
    const Instance inst = random_monotone_instance(3, 1, -2, 4, rng);
    for (ArmIndex i = 0; i < 3; ++i) EXPECT_EQ(payoff(inst, i, State(4 + 7)), payoff(inst, i, State(4)));
}

TEST(Payoff, RejectsBadArm) {
    const Instance inst = make_single_arm_instance();
    EXPECT_THROW(payoff(inst, 1, State(1)), std::out_of_range);
}

TEST(Payoff, MonotoneOverClippedDomain) {
    Rng rng = make_stream(6, Stream::Instance);
    for (int trial = 0; trial < 50; ++trial) {
        const Instance inst = random_monotone_instance(4, 2, -3, 4, rng);
        for (ArmIndex i = 0; i < inst.n(); ++i)
            for (int tau = -6; tau < 8; ++tau) {
                if (tau == 0) continue;
                const int next = tau == -1 ? 1 : tau + 1;
                EXPECT_LE(inst.table(i)(tau), inst.table(i)(next));
            }
    }
}

TEST(Instance, ValidatesBudget) {
    EXPECT_THROW(Instance::from_rows(0, -1, 1, {{0.0, 1.0}}), std::invalid_argument);
    EXPECT_THROW(Instance::from_rows(2, -1, 1, {{0.0, 1.0}}), std::invalid_argument);
    EXPECT_THROW(Instance::from_rows(1, -1, 1, {}), std::invalid_argument);
}

TEST(StepEnvironment, Examples) {
    EXPECT_EQ(values(step_environment({State(1), State(1)}, std::vector<ArmIndex>{0}, 1)),
              (std::vector<int>{-1, 2}));
    EXPECT_EQ(values(step_environment({State(-1), State(4)}, std::vector<ArmIndex>{}, 1)),
              (std::vector<int>{1, 5}));
    EXPECT_EQ(values(step_environment({State(-3), State(2)}, std::vector<ArmIndex>{0, 1}, 2)),
              (std::vector<int>{-4, -1}));
}

TEST(StepEnvironment, RejectsOversizedOrInvalidSets) {
    const ArmStateVector s{State(1), State(1), State(1)};
    EXPECT_THROW(step_environment(s, std::vector<ArmIndex>{0, 1}, 1), std::invalid_argument);
    EXPECT_THROW(step_environment(s, std::vector<ArmIndex>{0, 0}, 2), std::invalid_argument);
    EXPECT_THROW(step_environment(s, std::vector<ArmIndex>{3}, 2), std::out_of_range);
}

TEST(StepEnvironment, IsPure) {
    const ArmStateVector s{State(2), State(-1)};
    const auto a = step_environment(s, std::vector<ArmIndex>{1}, 1);
    const auto b = step_environment(s, std::vector<ArmIndex>{1}, 1);
    EXPECT_EQ(a, b);
    EXPECT_EQ(values(s), (std::vector<int>{2, -1}));
}

// Payoffs computed on states clipped to [tau_min, tau_max] equal payoffs on
// unclipped states for any action sequence.
TEST(Clipping, PayoffStreamUnchanged) {
    Rng rng = make_stream(12, Stream::Instance);
    for (int trial = 0; trial < 200; ++trial) {
        const Instance inst = random_monotone_instance(3, 2, -2, 3, rng);
        std::vector<int> raw(3, 1), clipped(3, 1);
        for (int t = 0; t < 60; ++t) {
            std::vector<bool> play(3);
            int count = 0;
            for (int i = 0; i < 3; ++i) {
                play[i] = count < 2 && bernoulli(rng, 0.5);
                count += play[i];
            }
            for (ArmIndex i = 0; i < 3; ++i) {
                if (play[i]) {
                    ASSERT_EQ(inst.table(i)(raw[i]), inst.table(i)(clipped[i]));
                }
                raw[i] = next_state(raw[i], play[i]);
                clipped[i] = clip_state(next_state(clipped[i], play[i]), inst.tau_min(), inst.tau_max());
            }
        }
    }
}

TEST(SimulateSchedule, CollectsPayoffsAtActualStates) {
    const Instance inst = make_single_arm_instance();
    const Schedule s{{0}, {0}, {}, {0}, {0}, {0}};
    const Trajectory tr = simulate_schedule(inst, s);
    EXPECT_EQ(tr.payoffs, (std::vector<double>{1, 1, 0, 1, 1, 0}));
    EXPECT_EQ(tr.total, 4.0);
    EXPECT_EQ(tr.states[2].front(), State(-2));
}
