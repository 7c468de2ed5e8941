#pragma once
// Model primitives for last-switch-dependent bandits with monotone payoffs:
// arm states, the switch-driven state transition, saturating payoff tables
// and the problem instance.

#include <algorithm>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace mlsd {

using ArmIndex = std::size_t;

/// Arm state: a nonzero integer. Positive values count idle rounds, negative
/// values count consecutive plays.
class State {
public:
    constexpr State() = default;
    constexpr explicit State(int value) : value_(value) {
        if (value == 0) throw std::invalid_argument("state 0 is not a valid arm state");
    }

    constexpr int value() const { return value_; }
    constexpr bool positive() const { return value_ > 0; }

    friend constexpr bool operator==(State, State) = default;
    friend constexpr auto operator<=>(State, State) = default;

private:
    int value_ = 1;
};

enum class Action : std::uint8_t { NoPlay = 0, Play = 1 };

/// Raw transition on integer states; callers guarantee tau != 0.
constexpr int next_state(int tau, bool played) {
    if (tau < 0) return played ? tau - 1 : 1;
    return played ? -1 : tau + 1;
}

constexpr State transition(State tau, bool played) {
    return State(next_state(tau.value(), played));
}

constexpr State transition(State tau, Action action) {
    return transition(tau, action == Action::Play);
}

/// Clamp a state into [tau_min, tau_max]. Zero cannot arise since the bounds
/// straddle it.
constexpr int clip_state(int tau, int tau_min, int tau_max) {
    return std::clamp(tau, tau_min, tau_max);
}

/// Number of states in S ∩ [tau_min, tau_max].
constexpr std::size_t state_count(int tau_min, int tau_max) {
    return static_cast<std::size_t>(tau_max - tau_min);
}

/// Dense index of a clipped state; skips 0.
constexpr std::size_t state_index(int tau, int tau_min) {
    return static_cast<std::size_t>(tau < 0 ? tau - tau_min : tau - tau_min - 1);
}

constexpr int state_at_index(std::size_t index, int tau_min) {
    const int v = static_cast<int>(index) + tau_min;
    return v < 0 ? v : v + 1;
}

enum class Monotonicity { Required, NotRequired };

/// Mean payoff per state over S ∩ [tau_min, tau_max]; evaluation saturates at
/// the boundaries.
class PayoffTable {
public:
    PayoffTable() = default;

    /// `values` lists states tau_min..-1 then 1..tau_max.
    PayoffTable(std::vector<double> values, int tau_min, int tau_max,
                Monotonicity monotonicity = Monotonicity::Required)
        : values_(std::move(values)), tau_min_(tau_min), tau_max_(tau_max) {
        if (tau_min >= 0 || tau_max <= 0)
            throw std::invalid_argument("payoff table needs tau_min < 0 < tau_max");
        if (values_.size() != state_count(tau_min, tau_max))
            throw std::invalid_argument("payoff table has " + std::to_string(values_.size()) +
                                        " entries, expected " +
                                        std::to_string(state_count(tau_min, tau_max)));
        for (double v : values_) {
            if (!(v >= 0.0 && v <= 1.0))
                throw std::invalid_argument("payoff values must lie in [0,1]");
        }
        if (monotonicity == Monotonicity::Required && !is_monotone())
            throw std::invalid_argument("payoff table is not monotone non-decreasing");
    }

    double operator()(int tau) const {
        return values_[state_index(clip_state(tau, tau_min_, tau_max_), tau_min_)];
    }
    double operator()(State tau) const { return (*this)(tau.value()); }

    bool is_monotone() const { return std::is_sorted(values_.begin(), values_.end()); }

    std::span<const double> values() const { return values_; }
    int tau_min() const { return tau_min_; }
    int tau_max() const { return tau_max_; }

    friend bool operator==(const PayoffTable&, const PayoffTable&) = default;

private:
    std::vector<double> values_;
    int tau_min_ = -1;
    int tau_max_ = 1;
};

/// n arms, per-round budget k, shared saturation bounds.
class Instance {
public:
    Instance() = default;

    Instance(std::size_t k, int tau_min, int tau_max, std::vector<PayoffTable> payoffs)
        : k_(k), tau_min_(tau_min), tau_max_(tau_max), payoffs_(std::move(payoffs)) {
        if (payoffs_.empty()) throw std::invalid_argument("instance needs at least one arm");
        if (k_ < 1 || k_ > payoffs_.size())
            throw std::invalid_argument("instance needs 1 <= k <= n");
        if (tau_min_ >= 0 || tau_max_ <= 0)
            throw std::invalid_argument("instance needs tau_min < 0 < tau_max");
        for (const auto& table : payoffs_) {
            if (table.tau_min() != tau_min_ || table.tau_max() != tau_max_)
                throw std::invalid_argument("payoff table bounds differ from instance bounds");
        }
    }

    /// Builds an instance from raw per-arm value rows (tau_min..-1, 1..tau_max).
    static Instance from_rows(std::size_t k, int tau_min, int tau_max,
                              const std::vector<std::vector<double>>& rows,
                              Monotonicity monotonicity = Monotonicity::Required) {
        std::vector<PayoffTable> tables;
        tables.reserve(rows.size());
        for (const auto& row : rows) tables.emplace_back(row, tau_min, tau_max, monotonicity);
        return Instance(k, tau_min, tau_max, std::move(tables));
    }

    std::size_t n() const { return payoffs_.size(); }
    std::size_t k() const { return k_; }
    int tau_min() const { return tau_min_; }
    int tau_max() const { return tau_max_; }
    const PayoffTable& table(ArmIndex arm) const { return payoffs_.at(arm); }
    const std::vector<PayoffTable>& tables() const { return payoffs_; }

    bool is_monotone() const {
        return std::all_of(payoffs_.begin(), payoffs_.end(),
                           [](const PayoffTable& t) { return t.is_monotone(); });
    }

    friend bool operator==(const Instance&, const Instance&) = default;

private:
    std::size_t k_ = 1;
    int tau_min_ = -1;
    int tau_max_ = 1;
    std::vector<PayoffTable> payoffs_;
};

inline double payoff(const Instance& instance, ArmIndex arm, State tau) {
    if (arm >= instance.n()) throw std::out_of_range("arm index out of range");
    return instance.table(arm)(tau);
}

/// tau_i(t) for every arm; starts at all ones.
using ArmStateVector = std::vector<State>;

inline ArmStateVector initial_states(std::size_t n) { return ArmStateVector(n, State(1)); }

/// Applies one round. `played` holds distinct arm indices.
inline ArmStateVector step_environment(const ArmStateVector& states,
                                       std::span<const ArmIndex> played, std::size_t k) {
    if (played.size() > k)
        throw std::invalid_argument("played set of size " + std::to_string(played.size()) +
                                    " exceeds budget k=" + std::to_string(k));
    std::vector<bool> is_played(states.size(), false);
    for (ArmIndex arm : played) {
        if (arm >= states.size()) throw std::out_of_range("played arm index out of range");
        if (is_played[arm]) throw std::invalid_argument("played set contains duplicates");
        is_played[arm] = true;
    }
    ArmStateVector next;
    next.reserve(states.size());
    for (std::size_t i = 0; i < states.size(); ++i) next.push_back(transition(states[i], is_played[i]));
    return next;
}

/// Per-round played sets.
using Schedule = std::vector<std::vector<ArmIndex>>;

/// States, payoffs and plays of a schedule executed from given initial states.
struct Trajectory {
    std::vector<ArmStateVector> states;  // states[t] at the start of round t (0-based)
    std::vector<double> payoffs;         // expected payoff collected in round t
    double total = 0.0;
};

inline Trajectory simulate_schedule(const Instance& instance, const Schedule& schedule,
                                    ArmStateVector states) {
    Trajectory out;
    out.states.reserve(schedule.size());
    out.payoffs.reserve(schedule.size());
    for (const auto& played : schedule) {
        double collected = 0.0;
        for (ArmIndex arm : played) collected += payoff(instance, arm, states.at(arm));
        out.states.push_back(states);
        out.payoffs.push_back(collected);
        out.total += collected;
        states = step_environment(states, played, instance.k());
    }
    return out;
}

inline Trajectory simulate_schedule(const Instance& instance, const Schedule& schedule) {
    return simulate_schedule(instance, schedule, initial_states(instance.n()));
}

}  // namespace mlsd
