#pragma once
// Exact finite-horizon optimum for small instances.
//
// dp_optimal runs backward induction over the joint state space clipped to
// [tau_min, tau_max] per arm; payoffs saturate outside that range, so the
// clipping loses nothing. exhaustive_optimal enumerates every action sequence
// on unclipped states and serves as an independent check.

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "core_model.hpp"

namespace mlsd {

class OracleBudgetExceeded : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline constexpr double kDefaultDpBudget = 1e8;
inline constexpr double kDefaultExhaustiveBudget = 1e7;

/// Number of action sets with at most k of n arms.
inline double action_set_count(std::size_t n, std::size_t k) {
    double total = 0.0, binom = 1.0;
    for (std::size_t j = 0; j <= std::min(n, k); ++j) {
        total += binom;
        binom = binom * static_cast<double>(n - j) / static_cast<double>(j + 1);
    }
    return total;
}

inline double dp_cost(const Instance& instance, long long T) {
    return std::pow(static_cast<double>(state_count(instance.tau_min(), instance.tau_max())),
                    static_cast<double>(instance.n())) *
           static_cast<double>(T) * action_set_count(instance.n(), instance.k());
}

struct OracleResult {
    double value = 0.0;
    Schedule schedule;  // one optimal played set per round; empty unless requested
};

namespace detail {

/// Bitmasks of action sets, larger sets first.
inline std::vector<std::uint32_t> action_masks(std::size_t n, std::size_t k) {
    if (n > 31) throw OracleBudgetExceeded("oracle supports at most 31 arms");
    std::vector<std::uint32_t> masks;
    for (std::uint32_t mask = 0; mask < (std::uint32_t{1} << n); ++mask)
        if (static_cast<std::size_t>(std::popcount(mask)) <= k) masks.push_back(mask);
    std::stable_sort(masks.begin(), masks.end(), [](std::uint32_t a, std::uint32_t b) {
        return std::popcount(a) > std::popcount(b);
    });
    return masks;
}

}  // namespace detail

/// Optimal total expected payoff over rounds 1..T from the all-ones state.
/// Among optimal actions the policy prefers the higher immediate payoff, then
/// the smaller played set.
inline OracleResult dp_optimal(const Instance& instance, long long T,
                               double budget = kDefaultDpBudget, bool want_schedule = true) {
    if (T < 0) throw std::invalid_argument("horizon must be non-negative");
    const double cost = dp_cost(instance, T);
    if (cost > budget)
        throw OracleBudgetExceeded("oracle budget exceeded: " + std::to_string(cost) +
                                   " state-action evaluations > budget " + std::to_string(budget));
    const std::size_t n = instance.n();
    const int tmin = instance.tau_min(), tmax = instance.tau_max();
    const std::size_t S = state_count(tmin, tmax);
    std::size_t joint = 1;
    std::vector<std::size_t> radix(n);
    for (std::size_t i = 0; i < n; ++i) {
        radix[i] = joint;
        joint *= S;
    }
    std::vector<std::size_t> next_play(S), next_rest(S);
    std::vector<std::vector<double>> pay(n, std::vector<double>(S));
    for (std::size_t d = 0; d < S; ++d) {
        const int tau = state_at_index(d, tmin);
        next_play[d] = state_index(clip_state(next_state(tau, true), tmin, tmax), tmin);
        next_rest[d] = state_index(clip_state(next_state(tau, false), tmin, tmax), tmin);
        for (std::size_t i = 0; i < n; ++i) pay[i][d] = instance.table(i)(tau);
    }
    const auto masks = detail::action_masks(n, instance.k());
    const auto horizon = static_cast<std::size_t>(T);
    std::vector<std::uint16_t> policy;
    if (want_schedule) policy.assign(horizon * joint, 0);

    std::vector<double> value_next(joint, 0.0), value(joint, 0.0);
    std::vector<std::size_t> digits(n);
    std::vector<std::ptrdiff_t> delta(n);
    constexpr double kTie = 1e-12;
    for (std::size_t t = horizon; t-- > 0;) {
        for (std::size_t s = 0; s < joint; ++s) {
            std::size_t rest_next = 0, rem = s;
            for (std::size_t i = 0; i < n; ++i) {
                digits[i] = rem % S;
                rem /= S;
                rest_next += radix[i] * next_rest[digits[i]];
                delta[i] = static_cast<std::ptrdiff_t>(radix[i] * next_play[digits[i]]) -
                           static_cast<std::ptrdiff_t>(radix[i] * next_rest[digits[i]]);
            }
            double best = -1.0, best_now = 0.0;
            int best_size = 0;
            std::size_t best_action = 0;
            for (std::size_t a = 0; a < masks.size(); ++a) {
                const std::uint32_t mask = masks[a];
                double now = 0.0;
                auto target = static_cast<std::ptrdiff_t>(rest_next);
                for (std::size_t i = 0; i < n; ++i) {
                    if (mask >> i & 1U) {
                        now += pay[i][digits[i]];
                        target += delta[i];
                    }
                }
                const double total = now + value_next[static_cast<std::size_t>(target)];
                const int size = std::popcount(mask);
                bool better = total > best + kTie;
                if (!better && total >= best - kTie)
                    better = now > best_now + kTie || (now >= best_now - kTie && size < best_size);
                if (a == 0 || better) {
                    best_action = a;
                    best_now = now;
                    best_size = size;
                }
                best = std::max(best, total);
            }
            value[s] = best;
            if (want_schedule) policy[t * joint + s] = static_cast<std::uint16_t>(best_action);
        }
        std::swap(value, value_next);
    }

    OracleResult out;
    std::size_t start = 0;
    for (std::size_t i = 0; i < n; ++i) start += radix[i] * state_index(1, tmin);
    out.value = horizon == 0 ? 0.0 : value_next[start];
    if (want_schedule) {
        std::size_t s = start;
        out.schedule.reserve(horizon);
        for (std::size_t t = 0; t < horizon; ++t) {
            const std::uint32_t mask = masks[policy[t * joint + s]];
            std::vector<ArmIndex> played;
            std::size_t next = 0, rem = s;
            for (std::size_t i = 0; i < n; ++i) {
                const std::size_t d = rem % S;
                rem /= S;
                const bool play = mask >> i & 1U;
                if (play) played.push_back(i);
                next += radix[i] * (play ? next_play[d] : next_rest[d]);
            }
            out.schedule.push_back(std::move(played));
            s = next;
        }
    }
    return out;
}

/// Brute force over all action sequences on unclipped states.
inline double exhaustive_optimal(const Instance& instance, long long T,
                                 double budget = kDefaultExhaustiveBudget) {
    if (T < 0) throw std::invalid_argument("horizon must be non-negative");
    const auto masks = detail::action_masks(instance.n(), instance.k());
    const double cost = std::pow(static_cast<double>(masks.size()), static_cast<double>(T));
    if (cost > budget)
        throw OracleBudgetExceeded("exhaustive search budget exceeded: " + std::to_string(cost) +
                                   " sequences > budget " + std::to_string(budget));
    std::vector<int> states(instance.n(), 1);
    auto search = [&](auto&& self, long long remaining) -> double {
        if (remaining == 0) return 0.0;
        double best = 0.0;
        const std::vector<int> saved = states;
        for (std::uint32_t mask : masks) {
            double now = 0.0;
            for (std::size_t i = 0; i < states.size(); ++i) {
                const bool play = mask >> i & 1U;
                if (play) now += instance.table(i)(saved[i]);
                states[i] = next_state(saved[i], play);
            }
            best = std::max(best, now + self(self, remaining - 1));
        }
        states = saved;
        return best;
    };
    return search(search, T);
}

/// Per-arm play/no-play sequence extracted from a schedule.
inline std::vector<Action> arm_actions(const Schedule& schedule, ArmIndex arm) {
    std::vector<Action> out;
    out.reserve(schedule.size());
    for (const auto& played : schedule)
        out.push_back(std::find(played.begin(), played.end(), arm) != played.end() ? Action::Play
                                                                                  : Action::NoPlay);
    return out;
}

/// Inverse of arm_actions over all arms.
inline Schedule schedule_from_actions(const std::vector<std::vector<Action>>& per_arm) {
    const std::size_t rounds = per_arm.empty() ? 0 : per_arm.front().size();
    Schedule out(rounds);
    for (ArmIndex arm = 0; arm < per_arm.size(); ++arm) {
        if (per_arm[arm].size() != rounds) throw std::invalid_argument("per-arm sequences differ in length");
        for (std::size_t t = 0; t < rounds; ++t)
            if (per_arm[arm][t] == Action::Play) out[t].push_back(arm);
    }
    return out;
}

}  // namespace mlsd
