#pragma once
// Randomized-rounding planner. Each arm draws at most one recurrent interval
// with probability (u-l) x*(i,u,l), then a uniform offset into that interval's
// cycle. Its virtual state runs around the cycle forever; in every round the
// arms whose virtual state asks for a play are candidates, and the k
// candidates with the highest payoff at their virtual states are played.

#include <algorithm>
#include <cstddef>
#include <map>
#include <optional>
#include <stdexcept>
#include <tuple>
#include <vector>

#include "core_model.hpp"
#include "intervals.hpp"
#include "lp_relaxation.hpp"
#include "rng.hpp"

namespace mlsd {

/// Per-arm mass may exceed 1 by this much through rounding error; it is
/// rescaled. Anything larger is rejected.
inline constexpr double kRoundingMassSlack = 1e-9;

inline std::vector<std::optional<RecurrentInterval>> round_intervals(const LpSolution& solution,
                                                                     Rng& rng) {
    const IntervalGrid& g = solution.grid;
    std::vector<std::optional<RecurrentInterval>> out(g.n);
    for (ArmIndex arm = 0; arm < g.n; ++arm) {
        const double mass = solution.arm_mass(arm);
        if (mass > 1.0 + kRoundingMassSlack)
            throw std::invalid_argument("interval probabilities of arm " + std::to_string(arm) +
                                        " sum to " + std::to_string(mass) + " > 1");
        const double scale = mass > 1.0 ? 1.0 / mass : 1.0;
        const double draw = uniform01(rng);
        double cumulative = 0.0;
        for (int u = 1; u <= g.tau_max && !out[arm]; ++u) {
            for (int l = -1; l >= g.tau_L; --l) {
                const double x = solution(arm, u, l);
                if (x <= 0.0) continue;
                cumulative += scale * (u - l) * x;
                if (draw < cumulative) {
                    out[arm] = RecurrentInterval(u, l);
                    break;
                }
            }
        }
    }
    return out;
}

struct PlannedArm {
    std::optional<RecurrentInterval> interval;
    int offset = 0;
    long long position = 0;  // index into the interval cycle of the current virtual state
    int virtual_state = 1;
};

/// Planner state after round t (t = 0 before the first round).
struct PlannerState {
    std::vector<PlannedArm> arms;
    std::vector<ArmIndex> active;
    long long t = 0;
};

inline PlannerState init_offsets(const std::vector<std::optional<RecurrentInterval>>& intervals,
                                 Rng& rng) {
    PlannerState state;
    state.arms.resize(intervals.size());
    for (ArmIndex arm = 0; arm < intervals.size(); ++arm) {
        if (!intervals[arm]) continue;
        PlannedArm& a = state.arms[arm];
        a.interval = intervals[arm];
        a.offset = static_cast<int>(uniform_below(rng, static_cast<std::uint64_t>(length(*a.interval))));
        a.position = a.offset;
        a.virtual_state = cycle_state(*a.interval, a.position);
        state.active.push_back(arm);
    }
    return state;
}

struct PlannerStep {
    long long t = 0;
    std::vector<ArmIndex> candidates;
    std::vector<ArmIndex> played;  // ascending arm order
    double virtual_payoff = 0.0;
};

/// Advances every virtual state by one round and selects the played set.
inline PlannerStep advance(PlannerState& state, const Instance& instance) {
    PlannerStep step;
    step.t = ++state.t;
    for (ArmIndex arm : state.active) {
        PlannedArm& a = state.arms[arm];
        const int len = length(*a.interval);
        if (++a.position == len) a.position = 0;
        a.virtual_state = cycle_state(*a.interval, a.position);
        if (trajectory(*a.interval, a.virtual_state) == Action::Play) step.candidates.push_back(arm);
    }
    std::vector<ArmIndex> ranked = step.candidates;
    const std::size_t take = std::min(instance.k(), ranked.size());
    auto value = [&](ArmIndex arm) { return instance.table(arm)(state.arms[arm].virtual_state); };
    std::partial_sort(ranked.begin(), ranked.begin() + static_cast<std::ptrdiff_t>(take), ranked.end(),
                      [&](ArmIndex a, ArmIndex b) {
                          const double va = value(a), vb = value(b);
                          return va != vb ? va > vb : a < b;
                      });
    ranked.resize(take);
    std::sort(ranked.begin(), ranked.end());
    for (ArmIndex arm : ranked) step.virtual_payoff += value(arm);
    step.played = std::move(ranked);
    return step;
}

inline std::pair<PlannerStep, PlannerState> step_planner(const PlannerState& state,
                                                         const Instance& instance) {
    PlannerState next = state;
    PlannerStep step = advance(next, instance);
    return {std::move(step), std::move(next)};
}

/// Rounding followed by offsets, drawing from separate generators.
inline PlannerState make_planner(const LpSolution& solution, Rng& rounding, Rng& offsets) {
    return init_offsets(round_intervals(solution, rounding), offsets);
}

struct PlannerTraceRow {
    long long t = 0;
    std::vector<int> virtual_states;  // 0 for arms without an interval
    std::vector<ArmIndex> candidates;
    std::vector<ArmIndex> played;
    double virtual_payoff = 0.0;
    double actual_payoff = 0.0;
};

struct CoSimulationOptions {
    long long rounds = 0;
    std::optional<ArmStateVector> initial_states;  // defaults to all ones
    bool record_trace = false;
    bool check_domination = true;
    long long domination_from = -1;  // first round checked; defaults to tau_max
};

struct CoSimulationResult {
    std::vector<double> virtual_payoffs;  // selection payoffs at virtual states
    std::vector<double> actual_payoffs;   // true payoffs at actual states
    std::vector<std::size_t> candidate_counts;
    std::size_t max_played = 0;
    std::size_t domination_checks = 0;
    std::size_t domination_violations = 0;
    std::vector<PlannerTraceRow> trace;
    ArmStateVector final_states;
};

/// Runs the planner against the environment. `planning` supplies the payoffs
/// used for selection, `truth` the payoffs credited at actual states.
inline CoSimulationResult co_simulate(PlannerState planner, const Instance& planning,
                                      const Instance& truth, const CoSimulationOptions& options) {
    if (planning.n() != truth.n() || planning.k() != truth.k())
        throw std::invalid_argument("planning and true instances differ in shape");
    CoSimulationResult out;
    const auto rounds = static_cast<std::size_t>(std::max(0LL, options.rounds));
    out.virtual_payoffs.reserve(rounds);
    out.actual_payoffs.reserve(rounds);
    out.candidate_counts.reserve(rounds);
    const long long check_from =
        options.domination_from >= 0 ? options.domination_from : truth.tau_max();
    std::vector<int> tau(truth.n(), 1);
    if (options.initial_states) {
        if (options.initial_states->size() != truth.n())
            throw std::invalid_argument("initial state vector has wrong length");
        for (std::size_t i = 0; i < tau.size(); ++i) tau[i] = (*options.initial_states)[i].value();
    }
    std::vector<bool> played_now(truth.n(), false);
    for (std::size_t r = 0; r < rounds; ++r) {
        PlannerStep step = advance(planner, planning);
        if (options.check_domination && step.t >= check_from) {
            for (ArmIndex arm : planner.active) {
                ++out.domination_checks;
                if (tau[arm] < planner.arms[arm].virtual_state) ++out.domination_violations;
            }
        }
        double actual = 0.0;
        for (ArmIndex arm : step.played) {
            actual += truth.table(arm)(tau[arm]);
            played_now[arm] = true;
        }
        out.max_played = std::max(out.max_played, step.played.size());
        out.virtual_payoffs.push_back(step.virtual_payoff);
        out.actual_payoffs.push_back(actual);
        out.candidate_counts.push_back(step.candidates.size());
        if (options.record_trace) {
            PlannerTraceRow row;
            row.t = step.t;
            row.virtual_states.assign(truth.n(), 0);
            for (ArmIndex arm : planner.active) row.virtual_states[arm] = planner.arms[arm].virtual_state;
            row.candidates = step.candidates;
            row.played = step.played;
            row.virtual_payoff = step.virtual_payoff;
            row.actual_payoff = actual;
            out.trace.push_back(std::move(row));
        }
        for (std::size_t i = 0; i < tau.size(); ++i) {
            tau[i] = next_state(tau[i], played_now[i]);
            played_now[i] = false;
        }
    }
    out.final_states.reserve(tau.size());
    for (int v : tau) out.final_states.emplace_back(v);
    return out;
}

struct CandidateTriple {
    ArmIndex arm = 0;
    RecurrentInterval interval;
    int virtual_state = 1;

    friend bool operator<(const CandidateTriple& a, const CandidateTriple& b) {
        return std::tie(a.arm, a.interval.u, a.interval.l, a.virtual_state) <
               std::tie(b.arm, b.interval.u, b.interval.l, b.virtual_state);
    }
    friend bool operator==(const CandidateTriple&, const CandidateTriple&) = default;
};

struct CandidateMarginals {
    std::size_t samples = 0;
    std::map<CandidateTriple, std::size_t> counts;
    std::size_t max_triples_per_arm = 0;  // over all samples; at most 1 by construction

    double frequency(const CandidateTriple& triple) const {
        auto it = counts.find(triple);
        return it == counts.end() || samples == 0 ? 0.0
                                                  : static_cast<double>(it->second) / samples;
    }
};

/// Empirical law of the candidate-triple set at round t over fresh draws of
/// intervals and offsets.
inline CandidateMarginals candidate_marginals(const LpSolution& solution, long long t,
                                              std::size_t num_samples, Rng& rng) {
    if (t < 1) throw std::invalid_argument("candidate_marginals needs t >= 1");
    CandidateMarginals out;
    out.samples = num_samples;
    std::vector<std::size_t> per_arm(solution.grid.n, 0);
    for (std::size_t s = 0; s < num_samples; ++s) {
        PlannerState state = make_planner(solution, rng, rng);
        std::fill(per_arm.begin(), per_arm.end(), 0);
        for (ArmIndex arm : state.active) {
            const PlannedArm& a = state.arms[arm];
            const int nu = cycle_state(*a.interval, a.offset + t);
            if (trajectory(*a.interval, nu) != Action::Play) continue;
            ++out.counts[CandidateTriple{arm, *a.interval, nu}];
            out.max_triples_per_arm = std::max(out.max_triples_per_arm, ++per_arm[arm]);
        }
    }
    return out;
}

}  // namespace mlsd
