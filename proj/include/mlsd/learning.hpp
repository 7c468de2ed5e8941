#pragma once
// Explore-then-Commit on top of the planner. A deterministic exploration
// schedule collects m payoff samples for every (arm, state) pair with state in
// 1..tau_max or tau_L..-1; the planner then runs on the empirical means for
// the rest of the horizon.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "gamma.hpp"
#include "core_model.hpp"
#include "lp_relaxation.hpp"
#include "oracle.hpp"
#include "planner.hpp"
#include "parallel.hpp"
#include "rng.hpp"

namespace mlsd {

struct InstanceShape {
    std::size_t n = 1;
    std::size_t k = 1;
    int tau_min = -1;
    int tau_max = 1;

    static InstanceShape of(const Instance& instance) {
        return {instance.n(), instance.k(), instance.tau_min(), instance.tau_max()};
    }
};

/// Index over the states that must be estimated: tau_L..-1 then 1..tau_max.
struct RequiredStates {
    int tau_L = -1;
    int tau_max = 1;

    std::size_t size() const { return state_count(tau_L, tau_max); }
    /// Dense index of the sample slot for a play at state tau, if one exists.
    std::optional<std::size_t> slot(int tau) const {
        if (tau < tau_L) return std::nullopt;
        return state_index(std::min(tau, tau_max), tau_L);
    }
    int state(std::size_t slot) const { return state_at_index(slot, tau_L); }
};

/// Upper bound on the exploration length: n m ((tau_max)^2 - tau_L + 2) / k.
inline double exploration_length_bound(std::size_t n, std::size_t k, int tau_max, int tau_L,
                                       std::size_t m) {
    return static_cast<double>(n) * static_cast<double>(m) *
           (static_cast<double>(tau_max) * tau_max - tau_L + 2) / static_cast<double>(k);
}

struct ExplorationSchedule {
    Schedule rounds;
    RequiredStates required;
    std::size_t m = 0;
    std::vector<long long> arm_start;  // first round (0-based) in which each arm plays

    std::size_t length() const { return rounds.size(); }
};

/// Deterministic exploration built round by round. Each arm owes m runs of
/// -tau_L + 1 consecutive plays (an entry play at a positive state followed by
/// plays at -1..tau_L) and m samples at every state 1..tau_max. A run entry also
/// counts as a positive sample, so arms enter where a positive sample is due; a
/// single play is used when no run is owed. Runs reserve their rounds up front,
/// so no round ever exceeds k plays.
inline ExplorationSchedule exploration_schedule(const InstanceShape& shape, int tau_L, std::size_t m) {
    if (m < 1) throw std::invalid_argument("exploration needs m >= 1");
    if (tau_L > -1) throw std::invalid_argument("tau_L must be <= -1");
    if (shape.k < 1 || shape.k > shape.n) throw std::invalid_argument("exploration needs 1 <= k <= n");
    ExplorationSchedule out;
    out.required = RequiredStates{tau_L, shape.tau_max};
    out.m = m;
    out.arm_start.assign(shape.n, -1);

    const int tmax = shape.tau_max;
    const auto run_length = static_cast<std::size_t>(1 - tau_L);
    struct ArmWork {
        int tau = 1;
        std::size_t run_left = 0;  // forced plays still owed by the current run
        std::size_t runs_left = 0;
        std::vector<std::size_t> deficit;  // index tau - 1
    };
    std::vector<ArmWork> arms(shape.n);
    for (auto& a : arms) {
        a.runs_left = m;
        a.deficit.assign(static_cast<std::size_t>(tmax), m);
    }
    auto owed = [&](const ArmWork& a) {
        std::size_t w = a.runs_left * (run_length + 1) + a.run_left;
        for (int tau = 1; tau <= tmax; ++tau) w += a.deficit[static_cast<std::size_t>(tau - 1)] * static_cast<std::size_t>(tau + 1);
        return w;
    };
    auto any_deficit = [&](const ArmWork& a, int lo, int hi) {
        for (int tau = std::max(lo, 1); tau <= std::min(hi, tmax); ++tau)
            if (a.deficit[static_cast<std::size_t>(tau - 1)] > 0) return true;
        return false;
    };
    auto done = [&] {
        return std::all_of(arms.begin(), arms.end(), [&](const ArmWork& a) {
            return a.run_left == 0 && a.runs_left == 0 && !any_deficit(a, 1, tmax);
        });
    };

    std::vector<std::size_t> reserved;  // plays already committed to future rounds
    for (std::size_t t = 0; !done(); ++t) {
        if (reserved.size() < t + run_length) reserved.resize(t + run_length, 0);
        std::vector<ArmIndex> played;
        for (ArmIndex i = 0; i < shape.n; ++i)
            if (arms[i].run_left > 0) played.push_back(i);

        // 0: a positive sample is due now; 1: a run is owed and waiting gains
        // nothing; 2: the arm has overshot the states it still needs.
        struct Option {
            int rank;
            std::size_t work;
            ArmIndex arm;
        };
        std::vector<Option> options;
        for (ArmIndex i = 0; i < shape.n; ++i) {
            const ArmWork& a = arms[i];
            if (a.run_left > 0 || a.tau < 0) continue;
            const int c = std::min(a.tau, tmax);
            const bool due = a.deficit[static_cast<std::size_t>(c - 1)] > 0;
            const bool later = any_deficit(a, c + 1, tmax);
            const bool earlier = any_deficit(a, 1, c - 1);
            int rank = -1;
            if (due) rank = 0;
            else if (a.runs_left > 0 && !later) rank = 1;
            else if (!later && earlier) rank = 2;
            if (rank >= 0) options.push_back({rank, owed(a), i});
        }
        std::sort(options.begin(), options.end(), [](const Option& x, const Option& y) {
            if (x.rank != y.rank) return x.rank < y.rank;
            if (x.work != y.work) return x.work > y.work;
            return x.arm < y.arm;
        });
        for (const Option& o : options) {
            if (reserved[t] >= shape.k) break;
            ArmWork& a = arms[o.arm];
            bool run_fits = a.runs_left > 0;
            for (std::size_t j = 1; run_fits && j < run_length; ++j) run_fits = reserved[t + j] < shape.k;
            if (run_fits) {
                for (std::size_t j = 0; j < run_length; ++j) ++reserved[t + j];
                a.run_left = run_length;
                --a.runs_left;
            } else if (o.rank == 1) {
                continue;  // the run does not fit yet and the entry itself is not needed
            } else {
                ++reserved[t];
                a.run_left = 1;
            }
            played.push_back(o.arm);
        }

        std::sort(played.begin(), played.end());
        std::vector<bool> on(shape.n, false);
        for (ArmIndex i : played) {
            on[i] = true;
            ArmWork& a = arms[i];
            if (a.tau > 0) {
                auto& d = a.deficit[static_cast<std::size_t>(std::min(a.tau, tmax) - 1)];
                if (d > 0) --d;
            }
            --a.run_left;
            if (out.arm_start[i] < 0) out.arm_start[i] = static_cast<long long>(t);
        }
        for (ArmIndex i = 0; i < shape.n; ++i) arms[i].tau = next_state(arms[i].tau, on[i]);
        out.rounds.push_back(std::move(played));
    }
    while (!out.rounds.empty() && out.rounds.back().empty()) out.rounds.pop_back();
    return out;
}

/// Sample counts per (arm, required state) obtained by executing a schedule
/// from the all-ones state.
inline std::vector<std::vector<std::size_t>> audit_sample_counts(const Schedule& schedule,
                                                                 std::size_t n,
                                                                 const RequiredStates& required) {
    std::vector<std::vector<std::size_t>> counts(n, std::vector<std::size_t>(required.size(), 0));
    std::vector<int> tau(n, 1);
    std::vector<bool> played(n, false);
    for (const auto& round : schedule) {
        for (ArmIndex arm : round) {
            played[arm] = true;
            if (auto s = required.slot(tau[arm])) ++counts[arm][*s];
        }
        for (std::size_t i = 0; i < n; ++i) {
            tau[i] = next_state(tau[i], played[i]);
            played[i] = false;
        }
    }
    return counts;
}

/// m = ceil(ln(2 n (tau_max - tau_L) / delta) / (2 eta^2)).
inline std::size_t samples_per_pair(double eta, double delta, std::size_t n, int tau_max, int tau_L) {
    if (!(eta > 0.0 && eta < 1.0)) throw std::invalid_argument("eta must lie in (0,1)");
    if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("delta must lie in (0,1)");
    const double pairs = 2.0 * static_cast<double>(n) * (tau_max - tau_L);
    return static_cast<std::size_t>(std::ceil(std::log(pairs / delta) / (2.0 * eta * eta)));
}

struct EtcConfig {
    double epsilon = 0.5;
    long long horizon = 0;
    double eta = 0.0;
    double delta = 0.0;
    std::size_t m = 0;
    int tau_L = -1;
};

/// Horizon-tuned parameters: delta = 1/T and
/// eta = cbrt(n ((tau_max)^2 - tau_L + 2) ln(2 n (tau_max - tau_L) T) / (2 k T)).
inline EtcConfig etc_config(const InstanceShape& shape, double epsilon, long long T) {
    if (T < 2) throw std::invalid_argument("horizon must be at least 2");
    EtcConfig c;
    c.epsilon = epsilon;
    c.horizon = T;
    c.tau_L = tau_L_for_epsilon(epsilon);
    const double n = static_cast<double>(shape.n), k = static_cast<double>(shape.k);
    const double tmax = shape.tau_max;
    const double Td = static_cast<double>(T);
    c.delta = 1.0 / Td;
    c.eta = std::cbrt(n * (tmax * tmax - c.tau_L + 2) * std::log(2.0 * n * (tmax - c.tau_L) * Td) /
                      (2.0 * k * Td));
    if (c.eta < 1.0) c.m = samples_per_pair(c.eta, c.delta, shape.n, shape.tau_max, c.tau_L);
    return c;
}

class ExplorationTooShort : public std::runtime_error {
public:
    ExplorationTooShort(const std::string& what, long long minimum_T)
        : std::runtime_error(what), minimum_T_(minimum_T) {}
    long long minimum_T() const { return minimum_T_; }

private:
    long long minimum_T_;
};

/// True when the horizon leaves at least one committed round after exploring.
inline bool horizon_viable(const InstanceShape& shape, double epsilon, long long T) {
    if (T < 2) return false;
    const EtcConfig c = etc_config(shape, epsilon, T);
    if (c.m == 0) return false;
    return exploration_schedule(shape, c.tau_L, c.m).length() < static_cast<std::size_t>(T);
}

/// Smallest viable horizon, found by doubling then bisection.
inline long long minimum_viable_horizon(const InstanceShape& shape, double epsilon) {
    long long hi = 2;
    while (!horizon_viable(shape, epsilon, hi)) {
        if (hi > (1LL << 40)) throw std::runtime_error("no viable horizon below 2^40");
        hi *= 2;
    }
    long long lo = hi / 2;
    while (hi - lo > 1) {
        const long long mid = lo + (hi - lo) / 2;
        (horizon_viable(shape, epsilon, mid) ? hi : lo) = mid;
    }
    return hi;
}

/// Empirical means per (arm, required state).
class PayoffEstimates {
public:
    PayoffEstimates() = default;
    PayoffEstimates(std::size_t n, RequiredStates required)
        : required_(required), counts_(n, std::vector<std::size_t>(required.size(), 0)),
          sums_(n, std::vector<double>(required.size(), 0.0)) {}

    void record(ArmIndex arm, int tau, double reward) {
        if (auto s = required_.slot(tau)) {
            ++counts_.at(arm)[*s];
            sums_[arm][*s] += reward;
        }
    }

    std::size_t n() const { return counts_.size(); }
    const RequiredStates& required() const { return required_; }
    std::size_t count(ArmIndex arm, int tau) const { return counts_.at(arm).at(*required_.slot(tau)); }
    double mean(ArmIndex arm, int tau) const {
        const std::size_t s = *required_.slot(tau);
        const std::size_t c = counts_.at(arm).at(s);
        return c == 0 ? 0.0 : sums_[arm][s] / static_cast<double>(c);
    }
    std::size_t min_count() const {
        std::size_t out = std::numeric_limits<std::size_t>::max();
        for (const auto& row : counts_)
            for (std::size_t c : row) out = std::min(out, c);
        return out;
    }

    /// Instance over tau_L..tau_max built from the means. Monotonicity is not
    /// enforced: estimates may be out of order.
    Instance to_instance(std::size_t k) const {
        std::vector<std::vector<double>> rows(n());
        for (ArmIndex arm = 0; arm < n(); ++arm)
            for (std::size_t s = 0; s < required_.size(); ++s)
                rows[arm].push_back(mean(arm, required_.state(s)));
        return Instance::from_rows(k, required_.tau_L, required_.tau_max, rows,
                                   Monotonicity::NotRequired);
    }

private:
    RequiredStates required_;
    std::vector<std::vector<std::size_t>> counts_;
    std::vector<std::vector<double>> sums_;
};

struct PayoffSample {
    ArmIndex arm = 0;
    int state = 1;
    double reward = 0.0;
};

/// Means from raw samples; every required pair needs at least m samples.
inline PayoffEstimates estimate_payoffs(std::span<const PayoffSample> samples, std::size_t n,
                                        const RequiredStates& required, std::size_t m) {
    PayoffEstimates est(n, required);
    for (const auto& s : samples) est.record(s.arm, s.state, s.reward);
    for (ArmIndex arm = 0; arm < n; ++arm) {
        for (std::size_t slot = 0; slot < required.size(); ++slot) {
            const int tau = required.state(slot);
            if (est.count(arm, tau) < m)
                throw std::invalid_argument("missing samples for arm " + std::to_string(arm) +
                                            " at state " + std::to_string(tau) + ": have " +
                                            std::to_string(est.count(arm, tau)) + ", need " +
                                            std::to_string(m));
        }
    }
    return est;
}

/// Bernoulli rewards with mean p_i(tau_i(t)). The learner only sees rewards;
/// states and means stay private.
class BernoulliEnvironment {
public:
    BernoulliEnvironment(const Instance& truth, Rng noise)
        : truth_(truth), noise_(noise), tau_(truth.n(), 1), played_(truth.n(), false) {}

    /// Rewards for `played`, in the same order.
    std::vector<double> play(std::span<const ArmIndex> played) {
        if (played.size() > truth_.k()) throw std::invalid_argument("played set exceeds budget k");
        std::vector<double> rewards;
        rewards.reserve(played.size());
        for (ArmIndex arm : played) {
            if (arm >= tau_.size() || played_[arm])
                throw std::invalid_argument("invalid or duplicate arm in played set");
            const double mean = truth_.table(arm)(tau_[arm]);
            expected_ += mean;
            rewards.push_back(bernoulli(noise_, mean) ? 1.0 : 0.0);
            played_[arm] = true;
        }
        for (std::size_t i = 0; i < tau_.size(); ++i) {
            tau_[i] = next_state(tau_[i], played_[i]);
            played_[i] = false;
        }
        ++rounds_;
        return rewards;
    }

    double expected_total() const { return expected_; }
    long long rounds() const { return rounds_; }

private:
    const Instance& truth_;
    Rng noise_;
    std::vector<int> tau_;
    std::vector<bool> played_;
    double expected_ = 0.0;
    long long rounds_ = 0;
};

enum class ReferenceKind { Opt, LpBound };

inline const char* to_string(ReferenceKind kind) {
    return kind == ReferenceKind::Opt ? "opt" : "lp_upper_bound";
}

struct RegretReference {
    double value = 0.0;  // OPT(T), or T * LP* when the oracle is out of budget
    ReferenceKind kind = ReferenceKind::Opt;
};

inline RegretReference regret_reference(const Instance& truth, long long T, int tau_L,
                                        double budget = kDefaultDpBudget) {
    if (dp_cost(truth, T) <= budget) return {dp_optimal(truth, T, budget, false).value, ReferenceKind::Opt};
    return {static_cast<double>(T) * solve_lp(build_lp(truth, tau_L)).objective, ReferenceKind::LpBound};
}

struct EtcRecord {
    std::uint64_t seed = 0;
    long long horizon = 0;
    std::size_t exploration_length = 0;
    std::size_t m = 0;
    double eta = 0.0;
    double realized_total = 0.0;   // R(T)
    double expected_total = 0.0;   // sum of means at the states actually played
    double exploration_total = 0.0;
    RegretReference reference;
    double regret = 0.0;           // (1 - eps) gamma_k reference - R(T)
    double max_estimate_error = 0.0;
    std::vector<double> committed_rewards;  // per committed round, when requested
};

struct EtcOptions {
    bool record_committed = false;
};

/// Explores, estimates, then commits to the planner on the estimates. The
/// environment is the learner's only access to payoffs.
inline EtcRecord etc_run(BernoulliEnvironment& env, const InstanceShape& shape, long long T,
                         double epsilon, std::uint64_t seed, const RegretReference& reference,
                         const EtcOptions& options = {}, const Instance* truth_for_diagnostics = nullptr) {
    const EtcConfig config = etc_config(shape, epsilon, T);
    if (config.m == 0 || !horizon_viable(shape, epsilon, T)) {
        const long long min_T = minimum_viable_horizon(shape, epsilon);
        throw ExplorationTooShort("horizon T=" + std::to_string(T) +
                                      " is too short for exploration; minimum viable T=" +
                                      std::to_string(min_T),
                                  min_T);
    }
    const ExplorationSchedule plan = exploration_schedule(shape, config.tau_L, config.m);

    EtcRecord record;
    record.seed = seed;
    record.horizon = T;
    record.exploration_length = plan.length();
    record.m = config.m;
    record.eta = config.eta;
    record.reference = reference;

    PayoffEstimates estimates(shape.n, plan.required);
    std::vector<int> tau(shape.n, 1);
    std::vector<bool> played_now(shape.n, false);
    auto observe = [&](std::span<const ArmIndex> played, const std::vector<double>& rewards,
                       bool explore) {
        for (std::size_t j = 0; j < played.size(); ++j) {
            if (explore) estimates.record(played[j], tau[played[j]], rewards[j]);
            played_now[played[j]] = true;
            record.realized_total += rewards[j];
        }
        for (std::size_t i = 0; i < shape.n; ++i) {
            tau[i] = next_state(tau[i], played_now[i]);
            played_now[i] = false;
        }
    };
    for (const auto& played : plan.rounds) observe(played, env.play(played), true);
    record.exploration_total = record.realized_total;

    const Instance planning = estimates.to_instance(shape.k);
    if (truth_for_diagnostics) {
        for (ArmIndex arm = 0; arm < shape.n; ++arm)
            for (std::size_t s = 0; s < plan.required.size(); ++s) {
                const int state = plan.required.state(s);
                record.max_estimate_error =
                    std::max(record.max_estimate_error,
                             std::abs(planning.table(arm)(state) - truth_for_diagnostics->table(arm)(state)));
            }
    }
    const LpSolution x = solve_lp(build_lp(planning, config.tau_L));
    Rng rounding = make_stream(seed, Stream::Rounding);
    Rng offsets = make_stream(seed, Stream::Offsets);
    PlannerState planner = make_planner(x, rounding, offsets);
    for (long long t = static_cast<long long>(plan.length()); t < T; ++t) {
        const PlannerStep step = advance(planner, planning);
        const auto rewards = env.play(step.played);
        if (options.record_committed) {
            double sum = 0.0;
            for (double r : rewards) sum += r;
            record.committed_rewards.push_back(sum);
        }
        observe(step.played, rewards, false);
    }
    record.expected_total = env.expected_total();
    record.regret = (1.0 - epsilon) * gamma_k(shape.k) * reference.value - record.realized_total;
    return record;
}

/// Payoff tables shifted by eta against the LP solution: states the solution's
/// intervals play at are lowered, all others raised, clamped to [0,1].
inline Instance adversarial_perturbation(const Instance& instance, const LpSolution& solution, double eta) {
    const int tmin = instance.tau_min(), tmax = instance.tau_max();
    std::vector<std::vector<double>> rows(instance.n());
    for (ArmIndex arm = 0; arm < instance.n(); ++arm) {
        std::vector<bool> used(state_count(tmin, tmax), false);
        solution.grid.for_each([&](std::size_t j, ArmIndex a, int u, int l) {
            if (a != arm || solution.x[j] <= 0.0) return;
            used[state_index(clip_state(u, tmin, tmax), tmin)] = true;
            for (int tau = l + 1; tau <= -1; ++tau) used[state_index(clip_state(tau, tmin, tmax), tmin)] = true;
        });
        for (std::size_t d = 0; d < used.size(); ++d) {
            const double p = instance.table(arm).values()[d];
            rows[arm].push_back(std::clamp(used[d] ? p - eta : p + eta, 0.0, 1.0));
        }
    }
    return Instance::from_rows(instance.k(), tmin, tmax, rows, Monotonicity::NotRequired);
}

struct RobustnessResult {
    double eta = 0.0;
    std::size_t trials = 0;
    double mean_gap = 0.0;  // per-round payoff, unperturbed minus perturbed
    double se = 0.0;
    double fitted_c = 0.0;  // mean_gap / (eta k); 0 when eta = 0
};

/// Per-round payoff deficit of the planner fed eta-perturbed tables, against
/// the planner on the true tables with the same rounding and offset streams.
/// Payoffs are credited at true means over rounds tau_max..T.
inline RobustnessResult robustness_gap(const Instance& instance, double eta, std::size_t trials,
                                       std::uint64_t base_seed, double epsilon, long long T) {
    if (!(eta >= 0.0 && eta < 1.0)) throw std::invalid_argument("eta must lie in [0,1)");
    const int tau_L = tau_L_for_epsilon(epsilon);
    const LpSolution exact = solve_lp(build_lp(instance, tau_L));
    const Instance perturbed = adversarial_perturbation(instance, exact, eta);
    const LpSolution skewed = solve_lp(build_lp(perturbed, tau_L));
    const long long from = instance.tau_max();
    if (T < from) throw std::invalid_argument("horizon shorter than tau_max");
    auto window_mean = [&](const std::vector<double>& payoffs) {
        double sum = 0.0;
        for (long long t = from; t <= T; ++t) sum += payoffs[static_cast<std::size_t>(t - 1)];
        return sum / static_cast<double>(T - from + 1);
    };
    const auto gaps = parallel_map<double>(trials, [&](std::size_t trial) {
        const std::uint64_t seed = base_seed + trial;
        CoSimulationOptions opts;
        opts.rounds = T;
        opts.check_domination = false;
        Rng r1 = make_stream(seed, Stream::Rounding), o1 = make_stream(seed, Stream::Offsets);
        Rng r2 = make_stream(seed, Stream::Rounding), o2 = make_stream(seed, Stream::Offsets);
        const auto base = co_simulate(make_planner(exact, r1, o1), instance, instance, opts);
        const auto pert = co_simulate(make_planner(skewed, r2, o2), perturbed, instance, opts);
        return window_mean(base.actual_payoffs) - window_mean(pert.actual_payoffs);
    });
    RobustnessResult out;
    out.eta = eta;
    out.trials = trials;
    double sum = 0.0, sq = 0.0;
    for (double g : gaps) sum += g;
    out.mean_gap = trials ? sum / static_cast<double>(trials) : 0.0;
    for (double g : gaps) sq += (g - out.mean_gap) * (g - out.mean_gap);
    out.se = trials > 1 ? std::sqrt(sq / static_cast<double>(trials - 1) / static_cast<double>(trials)) : 0.0;
    out.fitted_c = eta > 0.0 ? out.mean_gap / (eta * static_cast<double>(instance.k())) : 0.0;
    return out;
}

}  // namespace mlsd
