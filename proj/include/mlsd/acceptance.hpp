#pragma once
// End-to-end acceptance checks. Each check is deterministic given its fixed
// seeds and reports its measured values alongside pass/fail and runtime.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "analysis.hpp"
#include "core_model.hpp"
#include "gamma.hpp"
#include "intervals.hpp"
#include "learning.hpp"
#include "lp_relaxation.hpp"
#include "oracle.hpp"
#include "parallel.hpp"
#include "planner.hpp"
#include "rng.hpp"

namespace mlsd::acceptance {

struct CriterionResult {
    int id = 0;
    std::string name;
    bool pass = false;
    double seconds = 0.0;
    double time_limit = 0.0;
    std::string detail;
};

namespace detail {

inline int uniform_int(Rng& rng, int lo, int hi) {
    return lo + static_cast<int>(uniform_below(rng, static_cast<std::uint64_t>(hi - lo + 1)));
}

struct InstanceRanges {
    int n_lo = 2, n_hi = 2;
    int k_hi = 1;       // k drawn from 1..min(k_hi, n - 1), or 1..min(k_hi, n) when k_up_to_n
    bool k_up_to_n = false;
    int tau_max_lo = 1, tau_max_hi = 3;
    int tau_min_lo = -2, tau_min_hi = -1;
};

inline Instance draw_instance(Rng& rng, const InstanceRanges& r) {
    const int n = uniform_int(rng, r.n_lo, r.n_hi);
    const int k_cap = std::max(1, std::min(r.k_hi, r.k_up_to_n ? n : n - 1));
    const int k = uniform_int(rng, 1, k_cap);
    const int tau_max = uniform_int(rng, r.tau_max_lo, r.tau_max_hi);
    const int tau_min = uniform_int(rng, r.tau_min_lo, r.tau_min_hi);
    return random_monotone_instance(static_cast<std::size_t>(n), static_cast<std::size_t>(k), tau_min,
                                    tau_max, rng);
}

inline std::string describe(const Instance& instance) {
    std::ostringstream os;
    os << "n=" << instance.n() << " k=" << instance.k() << " tau=[" << instance.tau_min() << ','
       << instance.tau_max() << ']';
    return os.str();
}

template <class Fn>
CriterionResult timed(int id, std::string name, double limit, Fn&& body) {
    CriterionResult r;
    r.id = id;
    r.name = std::move(name);
    r.time_limit = limit;
    const auto start = std::chrono::steady_clock::now();
    std::ostringstream detail;
    bool ok = body(detail);
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (r.seconds >= limit) {
        detail << "; runtime " << r.seconds << " s exceeds " << limit << " s";
        ok = false;
    }
    r.pass = ok;
    r.detail = detail.str();
    return r;
}

/// Least-squares slope of y on x.
inline double fitted_slope(const std::vector<double>& x, const std::vector<double>& y) {
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= static_cast<double>(x.size());
    my /= static_cast<double>(y.size());
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
    }
    return sxy / sxx;
}

}  // namespace detail

/// Single-arm step instance: exact optimum values and LP value.
inline CriterionResult single_arm_reproduction() {
    return detail::timed(1, "single-arm optimum and LP value", 1.0, [](std::ostream& d) {
        const Instance inst = make_single_arm_instance();
        const double opt3 = dp_optimal(inst, 3).value;
        const double opt30 = dp_optimal(inst, 30).value;
        const double lp = solve_lp(build_lp(inst, -2)).objective;
        d.precision(12);
        d << "OPT(3)=" << opt3 << " OPT(30)/30=" << opt30 / 30.0 << " LP*=" << lp;
        return opt3 == 2.0 && std::abs(opt30 / 30.0 - 2.0 / 3.0) <= 1.0 / 30.0 &&
               std::abs(lp - 2.0 / 3.0) <= 1e-6;
    });
}

/// Backward induction against brute force on small random instances.
inline CriterionResult oracle_equivalence() {
    return detail::timed(2, "dynamic program equals exhaustive search", 30.0, [](std::ostream& d) {
        Rng rng = make_stream(2, Stream::Instance);
        detail::InstanceRanges ranges;
        ranges.n_lo = 1;
        ranges.n_hi = 2;
        ranges.k_hi = 2;
        ranges.k_up_to_n = true;
        std::size_t mismatches = 0;
        double worst = 0.0;
        for (int trial = 0; trial < 100; ++trial) {
            const Instance inst = detail::draw_instance(rng, ranges);
            const int T = detail::uniform_int(rng, 1, 8);
            const double a = dp_optimal(inst, T, kDefaultDpBudget, false).value;
            const double b = exhaustive_optimal(inst, T);
            if (a != b) ++mismatches;
            worst = std::max(worst, std::abs(a - b));
        }
        d << "100 instances, mismatches=" << mismatches << " max |diff|=" << worst;
        return mismatches == 0;
    });
}

/// Actual states dominate virtual states from round tau_max on.
inline CriterionResult virtual_state_domination() {
    return detail::timed(3, "actual state dominates virtual state", 60.0, [](std::ostream& d) {
        struct Out {
            std::size_t checks = 0, violations = 0, max_played_excess = 0;
        };
        const auto runs = parallel_map<Out>(1000, [](std::size_t s) {
            Rng rng = make_stream(3000 + s, Stream::Instance);
            detail::InstanceRanges ranges;
            ranges.n_lo = 2;
            ranges.n_hi = 5;
            ranges.k_hi = 4;
            ranges.tau_max_hi = 5;
            ranges.tau_min_lo = -4;
            const Instance inst = detail::draw_instance(rng, ranges);
            const int tau_L = -detail::uniform_int(rng, 1, 4);
            const LpSolution x = solve_lp(build_lp(inst, tau_L));
            Rng rounding = make_stream(3000 + s, Stream::Rounding);
            Rng offsets = make_stream(3000 + s, Stream::Offsets);
            CoSimulationOptions opts;
            opts.rounds = 200;
            const auto run = co_simulate(make_planner(x, rounding, offsets), inst, inst, opts);
            Out o;
            o.checks = run.domination_checks;
            o.violations = run.domination_violations;
            o.max_played_excess = run.max_played > inst.k() ? 1 : 0;
            return o;
        });
        std::size_t checks = 0, violations = 0, excess = 0;
        for (const auto& o : runs) {
            checks += o.checks;
            violations += o.violations;
            excess += o.max_played_excess;
        }
        d << "1000 co-simulations, " << checks << " checks, violations=" << violations
          << " budget overruns=" << excess;
        return violations == 0 && excess == 0 && checks > 0;
    });
}

/// Candidate-triple frequencies against the LP solution.
inline CriterionResult candidate_marginals_match() {
    return detail::timed(4, "candidate-triple marginals match LP solution", 120.0, [](std::ostream& d) {
        constexpr std::size_t kSamples = 100000;
        struct Out {
            std::size_t checks = 0, failures = 0, multi = 0;
            double worst_z = 0.0;
        };
        const auto runs = parallel_map<Out>(10, [](std::size_t s) {
            Rng rng = make_stream(4000 + s, Stream::Instance);
            detail::InstanceRanges ranges;
            ranges.n_lo = 2;
            ranges.n_hi = 4;
            ranges.k_hi = 2;
            ranges.tau_max_hi = 3;
            ranges.tau_min_lo = -3;
            const Instance inst = detail::draw_instance(rng, ranges);
            const int tau_L = -detail::uniform_int(rng, 1, 3);
            const LpSolution x = solve_lp(build_lp(inst, tau_L));
            Out o;
            const long long tmax = inst.tau_max();
            std::vector<long long> rounds{1, tmax, 2 * tmax};
            rounds.erase(std::unique(rounds.begin(), rounds.end()), rounds.end());
            Rng sampling = make_stream(4000 + s, Stream::Sampling);
            for (long long t : rounds) {
                const CandidateMarginals cm = candidate_marginals(x, t, kSamples, sampling);
                o.multi += cm.max_triples_per_arm > 1 ? 1 : 0;
                // Every play state of every interval in the grid; zero-mass
                // triples must never appear.
                x.grid.for_each([&](std::size_t, ArmIndex arm, int u, int l) {
                    const RecurrentInterval I(u, l);
                    const double p = x(arm, u, l);
                    for (int pos = 0; pos < length(I); ++pos) {
                        const int nu = cycle_state(I, pos);
                        if (trajectory(I, nu) != Action::Play) continue;
                        const double f = cm.frequency(CandidateTriple{arm, I, nu});
                        const double se = std::sqrt(p * (1.0 - p) / static_cast<double>(kSamples));
                        ++o.checks;
                        const double diff = std::abs(f - p);
                        if (se == 0.0) {
                            if (diff > 0.0) ++o.failures;
                            continue;
                        }
                        o.worst_z = std::max(o.worst_z, diff / se);
                        if (diff > 4.0 * se) ++o.failures;
                    }
                });
            }
            return o;
        });
        std::size_t checks = 0, failures = 0, multi = 0;
        double worst = 0.0;
        for (const auto& o : runs) {
            checks += o.checks;
            failures += o.failures;
            multi += o.multi;
            worst = std::max(worst, o.worst_z);
        }
        d << "10 instances, " << checks << " triples, outside 4 SE=" << failures
          << " worst z=" << worst << " multi-triple arms=" << multi;
        return failures == 0 && multi == 0;
    });
}

/// Mean per-round payoff over [tau_max, 500] against gamma_k LP* - 3 SE.
inline CriterionResult per_round_guarantee() {
    return detail::timed(5, "per-round payoff at least gamma_k LP*", 600.0, [](std::ostream& d) {
        Rng rng = make_stream(5, Stream::Instance);
        detail::InstanceRanges ranges;
        ranges.n_lo = 2;
        ranges.n_hi = 4;
        ranges.k_hi = 2;
        ranges.tau_max_hi = 4;
        ranges.tau_min_lo = -4;
        std::size_t failures = 0;
        double worst_margin = 1e300;
        for (int trial = 0; trial < 50; ++trial) {
            const Instance inst = detail::draw_instance(rng, ranges);
            const ExperimentReport r =
                approximation_experiment(inst, 0.25, 500, 200, 50000 + 1000 * trial, detail::describe(inst));
            if (!r.pass) ++failures;
            worst_margin = std::min(worst_margin, (r.mean - r.target) / std::max(r.se, 1e-300));
        }
        d << "50 instances x 200 seeds, failures=" << failures
          << " min (mean - gamma_k LP*)/SE=" << worst_margin;
        return failures == 0;
    });
}

/// T LP* >= (1 - 1/(1 - tau_L)) OPT(T) - n.
inline CriterionResult lp_upper_bound() {
    return detail::timed(6, "LP value bounds the finite-horizon optimum", 300.0, [](std::ostream& d) {
        Rng rng = make_stream(6, Stream::Instance);
        detail::InstanceRanges ranges;
        ranges.n_lo = 2;
        ranges.n_hi = 3;
        ranges.k_hi = 2;
        ranges.tau_max_hi = 3;
        ranges.tau_min_lo = -3;
        std::size_t violations = 0;
        double worst_slack = 1e300;
        for (int trial = 0; trial < 50; ++trial) {
            const Instance inst = detail::draw_instance(rng, ranges);
            const int tau_L = -detail::uniform_int(rng, 1, 2);
            const int T = detail::uniform_int(rng, 1, 15);
            const double opt = dp_optimal(inst, T, kDefaultDpBudget, false).value;
            const double lp = solve_lp(build_lp(inst, tau_L)).objective;
            const double slack = T * lp - ((1.0 - 1.0 / (1.0 - tau_L)) * opt - static_cast<double>(inst.n()));
            worst_slack = std::min(worst_slack, slack);
            if (slack < -1e-9) ++violations;
        }
        d << "50 instances, violations=" << violations << " min slack=" << worst_slack;
        return violations == 0;
    });
}

/// Planner payoff on the threshold instance against gamma_k.
inline CriterionResult tightness() {
    return detail::timed(7, "threshold instance ratio matches gamma_k", 300.0, [](std::ostream& d) {
        bool ok = true;
        d.precision(6);
        for (std::size_t k : {1, 2}) {
            const ExperimentReport r = tightness_experiment(k, 50, 10000, 200, 7000 + 100 * k);
            ok = ok && r.pass;
            d << "k=" << k << " ratio=" << r.mean << " (se " << r.se << ") gamma_k=" << r.gamma
              << " |diff|=" << std::abs(r.mean - r.gamma) << "; ";
        }
        return ok;
    });
}

struct RegretPoint {
    long long T = 0;
    double mean_regret = 0.0;
    double se = 0.0;
    double mean_realized = 0.0;
    double reference = 0.0;
    std::string reference_kind;
    std::size_t exploration_length = 0;
};

/// Mean regret of explore-then-commit on the single-arm instance per horizon.
inline std::vector<RegretPoint> regret_curve(const std::vector<long long>& horizons, std::size_t seeds,
                                             double epsilon, std::uint64_t base_seed) {
    const Instance truth = make_single_arm_instance();
    const InstanceShape shape = InstanceShape::of(truth);
    std::vector<RegretPoint> out;
    for (long long T : horizons) {
        const RegretReference ref = regret_reference(truth, T, tau_L_for_epsilon(epsilon));
        const auto records = parallel_map<EtcRecord>(seeds, [&](std::size_t s) {
            const std::uint64_t seed = base_seed + s;
            BernoulliEnvironment env(truth, make_stream(seed, Stream::PayoffNoise));
            return etc_run(env, shape, T, epsilon, seed, ref);
        });
        std::vector<double> regrets, realized;
        for (const auto& r : records) {
            regrets.push_back(r.regret);
            realized.push_back(r.realized_total);
        }
        const MeanSe st = mean_se(regrets);
        out.push_back({T, st.mean, st.se, mean_se(realized).mean, ref.value, to_string(ref.kind),
                       records.front().exploration_length});
    }
    return out;
}

/// Regret slope and per-round regret trend on the single-arm instance.
inline CriterionResult regret_trend() {
    return detail::timed(8, "explore-then-commit regret trend", 1800.0, [](std::ostream& d) {
        std::vector<long long> horizons;
        for (int e = 10; e <= 16; ++e) horizons.push_back(1LL << e);
        const auto curve = regret_curve(horizons, 50, 0.5, 8000);
        std::vector<double> lx, ly;
        bool positive = true, decreasing = true;
        d.precision(6);
        for (std::size_t i = 0; i < curve.size(); ++i) {
            const auto& p = curve[i];
            d << "T=" << p.T << " Reg=" << p.mean_regret << " Reg/T=" << p.mean_regret / p.T << "; ";
            if (p.mean_regret <= 0.0) positive = false;
            else {
                lx.push_back(std::log(static_cast<double>(p.T)));
                ly.push_back(std::log(p.mean_regret));
            }
            if (i > 0 && !(p.mean_regret / p.T < curve[i - 1].mean_regret / curve[i - 1].T)) decreasing = false;
        }
        double slope = std::nan("");
        if (positive && lx.size() >= 2) slope = detail::fitted_slope(lx, ly);
        d << "slope=" << slope << (positive ? "" : " (mean regret not positive, slope undefined)")
          << " Reg/T decreasing=" << (decreasing ? "yes" : "no");
        // Undiscounted gap OPT(T) - R(T), reported alongside.
        std::vector<double> gx, gy;
        for (const auto& p : curve) {
            const double gap = p.reference - p.mean_realized;
            if (gap > 0.0) {
                gx.push_back(std::log(static_cast<double>(p.T)));
                gy.push_back(std::log(gap));
            }
        }
        if (gx.size() >= 2) d << "; OPT-R slope=" << detail::fitted_slope(gx, gy);
        return positive && slope <= 0.85 && decreasing;
    });
}

/// Exploration schedules: feasibility, sample counts, length bound.
inline CriterionResult exploration_audit() {
    return detail::timed(9, "exploration schedule audit", 60.0, [](std::ostream& d) {
        Rng rng = make_stream(9, Stream::Instance);
        std::size_t failures = 0;
        double worst_ratio = 0.0;
        for (int trial = 0; trial < 20; ++trial) {
            InstanceShape shape;
            shape.n = static_cast<std::size_t>(detail::uniform_int(rng, 2, 6));
            shape.k = static_cast<std::size_t>(detail::uniform_int(rng, 1, static_cast<int>(shape.n) - 1));
            shape.tau_max = detail::uniform_int(rng, 1, 4);
            shape.tau_min = -detail::uniform_int(rng, 1, 4);
            const int tau_L = -detail::uniform_int(rng, 1, 4);
            const auto m = static_cast<std::size_t>(detail::uniform_int(rng, 2, 40));
            const ExplorationSchedule s = exploration_schedule(shape, tau_L, m);
            bool ok = true;
            for (const auto& round : s.rounds) ok = ok && round.size() <= shape.k;
            for (const auto& row : audit_sample_counts(s.rounds, shape.n, s.required))
                for (std::size_t c : row) ok = ok && c >= m;
            const double bound = exploration_length_bound(shape.n, shape.k, shape.tau_max, tau_L, m);
            worst_ratio = std::max(worst_ratio, static_cast<double>(s.length()) / bound);
            ok = ok && static_cast<double>(s.length()) <= bound;
            if (!ok) {
                ++failures;
                d << "failed: n=" << shape.n << " k=" << shape.k << " tau_max=" << shape.tau_max
                  << " tau_L=" << tau_L << " m=" << m << " length=" << s.length() << " bound=" << bound
                  << "; ";
            }
        }
        d << "20 configurations, failures=" << failures << " max length/bound=" << worst_ratio;
        return failures == 0;
    });
}

/// Normalized optimal schedules keep enough payoff and decompose cleanly.
inline CriterionResult normalization_bound() {
    return detail::timed(10, "normalized optimal schedule", 300.0, [](std::ostream& d) {
        Rng rng = make_stream(10, Stream::Instance);
        detail::InstanceRanges ranges;
        ranges.n_lo = 2;
        ranges.n_hi = 3;
        ranges.k_hi = 2;
        ranges.tau_max_hi = 3;
        ranges.tau_min_lo = -3;
        std::size_t violations = 0, bad_decompositions = 0;
        double worst_slack = 1e300;
        for (int trial = 0; trial < 50; ++trial) {
            const Instance inst = detail::draw_instance(rng, ranges);
            const int tau_L = -detail::uniform_int(rng, 1, 3);
            const int T = detail::uniform_int(rng, 1, 15);
            const OracleResult opt = dp_optimal(inst, T);
            std::vector<ArmPlaySequence> per_arm;
            for (ArmIndex arm = 0; arm < inst.n(); ++arm) {
                per_arm.push_back(normalize_schedule(arm_actions(opt.schedule, arm), tau_L));
                try {
                    const Decomposition dec = decompose(per_arm.back());
                    for (const auto& I : dec.intervals)
                        if (I.l < tau_L) ++bad_decompositions;
                } catch (const std::invalid_argument&) {
                    ++bad_decompositions;
                }
            }
            const double value = simulate_schedule(inst, schedule_from_actions(per_arm)).total;
            const double slack = value - ((1.0 - 1.0 / (1.0 - tau_L)) * opt.value - static_cast<double>(inst.n()));
            worst_slack = std::min(worst_slack, slack);
            if (slack < -1e-9) ++violations;
        }
        d << "50 instances, payoff violations=" << violations << " bad decompositions=" << bad_decompositions
          << " min slack=" << worst_slack;
        return violations == 0 && bad_decompositions == 0;
    });
}

inline CriterionResult run(int id) {
    switch (id) {
        case 1: return single_arm_reproduction();
        case 2: return oracle_equivalence();
        case 3: return virtual_state_domination();
        case 4: return candidate_marginals_match();
        case 5: return per_round_guarantee();
        case 6: return lp_upper_bound();
        case 7: return tightness();
        case 8: return regret_trend();
        case 9: return exploration_audit();
        case 10: return normalization_bound();
    }
    throw std::invalid_argument("unknown acceptance criterion " + std::to_string(id));
}

inline constexpr int kCriterionCount = 10;

}  // namespace mlsd::acceptance
