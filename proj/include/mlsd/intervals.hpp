#pragma once
// Recurrent intervals I(u, l): starting from state +1 the arm idles until state
// u, is played there and then -l-1 more times, and rests once at state l,
// returning to +1. Also the per-arm schedule normalization that cuts long play
// runs and the decomposition of a normalized schedule into intervals.

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "core_model.hpp"

namespace mlsd {

struct RecurrentInterval {
    int u = 1;   // first-play state, u >= 1
    int l = -1;  // resting state, l <= -1

    RecurrentInterval() = default;
    RecurrentInterval(int u_, int l_) : u(u_), l(l_) {
        if (u < 1 || l > -1)
            throw std::invalid_argument("recurrent interval needs u >= 1 and l <= -1, got (" +
                                        std::to_string(u) + ", " + std::to_string(l) + ")");
    }

    friend bool operator==(const RecurrentInterval&, const RecurrentInterval&) = default;
};

inline int length(const RecurrentInterval& interval) { return interval.u - interval.l; }
inline int plays_per_cycle(const RecurrentInterval& interval) { return -interval.l; }

namespace detail {
inline void require_in_interval(const RecurrentInterval& interval, int tau) {
    if (tau == 0 || tau < interval.l || tau > interval.u)
        throw std::out_of_range("state " + std::to_string(tau) + " outside interval [" +
                                std::to_string(interval.l) + ", " +
                                std::to_string(interval.u) + "]");
}
}  // namespace detail

/// Characteristic trajectory: Play on {l+1..-1} ∪ {u}, NoPlay on {1..u-1} ∪ {l}.
inline Action trajectory(const RecurrentInterval& interval, int tau) {
    detail::require_in_interval(interval, tau);
    if (tau == interval.u) return Action::Play;
    if (tau < 0 && tau > interval.l) return Action::Play;
    return Action::NoPlay;
}

inline Action trajectory(const RecurrentInterval& interval, State tau) {
    return trajectory(interval, tau.value());
}

inline int interval_transition(const RecurrentInterval& interval, int tau) {
    return next_state(tau, trajectory(interval, tau) == Action::Play);
}

inline State interval_transition(const RecurrentInterval& interval, State tau) {
    return State(interval_transition(interval, tau.value()));
}

/// State at position `pos` of the cycle 1, 2, ..., u, -1, ..., l.
inline int cycle_state(const RecurrentInterval& interval, long long pos) {
    const long long len = length(interval);
    long long p = pos % len;
    if (p < 0) p += len;
    if (p < interval.u) return static_cast<int>(p + 1);
    return -static_cast<int>(p - interval.u + 1);
}

/// Inverse of cycle_state.
inline int cycle_position(const RecurrentInterval& interval, int tau) {
    detail::require_in_interval(interval, tau);
    return tau > 0 ? tau - 1 : interval.u - tau - 1;
}

/// q_i(u, l) = p_i(u) + sum_{tau=l+1}^{-1} p_i(tau).
inline double aggregated_payoff(const Instance& instance, ArmIndex arm,
                                const RecurrentInterval& interval) {
    const PayoffTable& table = instance.table(arm);
    double q = table(interval.u);
    for (int tau = interval.l + 1; tau <= -1; ++tau) q += table(tau);
    return q;
}

/// Play/no-play sequence of a single arm.
using ArmPlaySequence = std::vector<Action>;

/// One period of the interval's actions starting at state 1.
inline ArmPlaySequence cycle_actions(const RecurrentInterval& interval) {
    ArmPlaySequence seq;
    seq.reserve(static_cast<std::size_t>(length(interval)));
    int tau = 1;
    for (int i = 0; i < length(interval); ++i) {
        seq.push_back(trajectory(interval, tau));
        tau = interval_transition(interval, tau);
    }
    return seq;
}

/// Cuts every (1 - tau_L)-th consecutive play (the run restarts after the cut)
/// and then removes the last play of the input sequence. The result has no
/// run longer than -tau_L plays and ends with a non-play.
inline ArmPlaySequence normalize_schedule(const ArmPlaySequence& seq, int tau_L) {
    if (tau_L > -1) throw std::invalid_argument("normalize_schedule needs tau_L <= -1");
    const int cut_at = 1 - tau_L;
    ArmPlaySequence out(seq.size(), Action::NoPlay);
    int run = 0;
    std::ptrdiff_t last_play = -1;
    for (std::size_t t = 0; t < seq.size(); ++t) {
        if (seq[t] != Action::Play) {
            run = 0;
            continue;
        }
        last_play = static_cast<std::ptrdiff_t>(t);
        if (++run == cut_at) {
            run = 0;
        } else {
            out[t] = Action::Play;
        }
    }
    if (last_play >= 0) out[static_cast<std::size_t>(last_play)] = Action::NoPlay;
    return out;
}

struct Decomposition {
    std::vector<RecurrentInterval> intervals;
    std::size_t trailing_non_plays = 0;

    friend bool operator==(const Decomposition&, const Decomposition&) = default;
};

/// Splits a sequence that starts at state 1 into recurrent intervals (each
/// closed by its resting round) plus trailing non-plays.
inline Decomposition decompose(const ArmPlaySequence& seq) {
    Decomposition out;
    int tau = 1;
    int u = 0;
    for (Action a : seq) {
        const bool play = a == Action::Play;
        if (tau > 0 && play) u = tau;
        if (tau < 0 && !play) out.intervals.emplace_back(u, tau);
        tau = next_state(tau, play);
    }
    if (tau < 0)
        throw std::invalid_argument("sequence ends inside a recurrent interval (last round is a play)");
    out.trailing_non_plays = static_cast<std::size_t>(tau - 1);
    return out;
}

}  // namespace mlsd
