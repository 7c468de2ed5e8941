#pragma once
// Experiments around the planner's guarantee: the threshold instance on which
// the guarantee is tight, per-round payoff against gamma_k * LP*, and a random
// monotone instance generator.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "core_model.hpp"
#include "gamma.hpp"
#include "lp_relaxation.hpp"
#include "parallel.hpp"
#include "planner.hpp"
#include "rng.hpp"

namespace mlsd {

struct MeanSe {
    double mean = 0.0;
    double se = 0.0;  // standard error of the mean
    std::size_t count = 0;
};

inline MeanSe mean_se(const std::vector<double>& xs) {
    MeanSe out;
    out.count = xs.size();
    if (xs.empty()) return out;
    double sum = 0.0;
    for (double x : xs) sum += x;
    out.mean = sum / static_cast<double>(xs.size());
    if (xs.size() > 1) {
        double sq = 0.0;
        for (double x : xs) sq += (x - out.mean) * (x - out.mean);
        out.se = std::sqrt(sq / static_cast<double>(xs.size() - 1) / static_cast<double>(xs.size()));
    }
    return out;
}

/// n = m k identical arms paying 0 below state m and 1 from m on.
inline Instance make_tight_instance(std::size_t k, int m) {
    if (k < 1) throw std::invalid_argument("tight instance needs k >= 1");
    if (m < 1) throw std::invalid_argument("tight instance needs m >= 1");
    const std::size_t n = static_cast<std::size_t>(m) * k;
    std::vector<double> row;
    for (int tau = -1; tau <= m; ++tau)
        if (tau != 0) row.push_back(tau >= m ? 1.0 : 0.0);
    return Instance::from_rows(k, -1, m, std::vector<std::vector<double>>(n, row));
}

/// The single-arm instance paying 1 for states >= -1 and 0 below.
inline Instance make_single_arm_instance() {
    return Instance::from_rows(1, -2, 1, {{0.0, 1.0, 1.0}});
}

/// Monotone tables from sorted uniform draws.
inline Instance random_monotone_instance(std::size_t n, std::size_t k, int tau_min, int tau_max, Rng& rng) {
    std::vector<std::vector<double>> rows(n);
    for (auto& row : rows) {
        row.resize(state_count(tau_min, tau_max));
        for (double& v : row) v = uniform01(rng);
        std::sort(row.begin(), row.end());
    }
    return Instance::from_rows(k, tau_min, tau_max, rows);
}

struct ExperimentReport {
    std::string name;
    std::string instance;  // short descriptor
    std::size_t seeds = 0;
    long long horizon = 0;
    double mean = 0.0;     // per-round payoff (or ratio), averaged over seeds
    double se = 0.0;
    double reference = 0.0;
    std::string reference_kind;
    double gamma = 0.0;
    double target = 0.0;   // value the mean is compared against
    double ratio = 0.0;    // mean / reference
    bool pass = false;
    std::map<std::string, double> extras;

    double ci_low() const { return mean - 1.96 * se; }
    double ci_high() const { return mean + 1.96 * se; }
};

/// P[Binomial(n, p) = j] summed into E[min(X, k)] / k.
inline double binomial_min_ratio(std::size_t n, double p, std::size_t k) {
    double expected = 0.0;
    double log_pmf = static_cast<double>(n) * std::log1p(-p);  // j = 0
    for (std::size_t j = 0; j <= n; ++j) {
        if (j > 0)
            log_pmf += std::log(static_cast<double>(n - j + 1) / static_cast<double>(j)) +
                       std::log(p) - std::log1p(-p);
        expected += std::exp(log_pmf) * static_cast<double>(std::min(j, k));
    }
    return expected / static_cast<double>(k);
}

/// Planner on the threshold instance with every arm starting at state m.
/// Each round's payoff equals min(candidates, k), so the per-seed mean divided
/// by k estimates E[min(X,k)]/k.
inline ExperimentReport tightness_experiment(std::size_t k, int m, long long T, std::size_t seeds,
                                             std::uint64_t base_seed) {
    if (m < 1) throw std::invalid_argument("tightness experiment needs m >= 1");
    const Instance instance = make_tight_instance(k, m);
    const LpSolution x = solve_lp(build_lp(instance, -1));
    const auto per_seed = parallel_map<double>(seeds, [&](std::size_t s) {
        const std::uint64_t seed = base_seed + s;
        Rng rounding = make_stream(seed, Stream::Rounding);
        Rng offsets = make_stream(seed, Stream::Offsets);
        CoSimulationOptions opts;
        opts.rounds = T;
        opts.initial_states = ArmStateVector(instance.n(), State(m));
        opts.check_domination = false;
        const auto run = co_simulate(make_planner(x, rounding, offsets), instance, instance, opts);
        double sum = 0.0;
        for (double v : run.actual_payoffs) sum += v;
        return sum / static_cast<double>(T) / static_cast<double>(k);
    });
    const MeanSe stats = mean_se(per_seed);
    ExperimentReport r;
    r.name = "tightness";
    r.instance = "threshold k=" + std::to_string(k) + " m=" + std::to_string(m);
    r.seeds = seeds;
    r.horizon = T;
    r.mean = stats.mean;
    r.se = stats.se;
    r.reference = 1.0;
    r.reference_kind = "long_run_opt_over_k";
    r.gamma = gamma_k(k);
    r.target = r.gamma;
    r.ratio = stats.mean;
    r.pass = std::abs(stats.mean - r.gamma) <= 0.02;
    r.extras["lp_objective"] = x.objective;
    r.extras["candidate_probability"] = x.arm_mass(0) / static_cast<double>(m + 1);
    r.extras["binomial_reference"] =
        binomial_min_ratio(instance.n(), 1.0 / static_cast<double>(m + 1), k);
    return r;
}

/// Mean per-round payoff over rounds tau_max..T, per seed, compared against
/// gamma_k * LP* - 3 SE.
inline ExperimentReport approximation_experiment(const Instance& instance, double epsilon, long long T,
                                                 std::size_t seeds, std::uint64_t base_seed,
                                                 const std::string& descriptor = "instance") {
    const int tau_L = tau_L_for_epsilon(epsilon);
    const LpSolution x = solve_lp(build_lp(instance, tau_L));
    const long long from = instance.tau_max();
    if (T < from) throw std::invalid_argument("horizon shorter than tau_max");
    struct SeedResult {
        double actual = 0.0;
        double virtual_mean = 0.0;
        std::size_t violations = 0;
        std::size_t max_played = 0;
    };
    const auto runs = parallel_map<SeedResult>(seeds, [&](std::size_t s) {
        const std::uint64_t seed = base_seed + s;
        Rng rounding = make_stream(seed, Stream::Rounding);
        Rng offsets = make_stream(seed, Stream::Offsets);
        CoSimulationOptions opts;
        opts.rounds = T;
        const auto run = co_simulate(make_planner(x, rounding, offsets), instance, instance, opts);
        SeedResult out;
        for (long long t = from; t <= T; ++t) {
            out.actual += run.actual_payoffs[static_cast<std::size_t>(t - 1)];
            out.virtual_mean += run.virtual_payoffs[static_cast<std::size_t>(t - 1)];
        }
        out.actual /= static_cast<double>(T - from + 1);
        out.virtual_mean /= static_cast<double>(T - from + 1);
        out.violations = run.domination_violations;
        out.max_played = run.max_played;
        return out;
    });
    std::vector<double> actual, virt;
    std::size_t violations = 0, max_played = 0;
    for (const auto& r : runs) {
        actual.push_back(r.actual);
        virt.push_back(r.virtual_mean);
        violations += r.violations;
        max_played = std::max(max_played, r.max_played);
    }
    const MeanSe stats = mean_se(actual);
    ExperimentReport r;
    r.name = "approximation";
    r.instance = descriptor;
    r.seeds = seeds;
    r.horizon = T;
    r.mean = stats.mean;
    r.se = stats.se;
    r.reference = x.objective;
    r.reference_kind = "lp";
    r.gamma = gamma_k(instance.k());
    r.target = r.gamma * x.objective;
    r.ratio = x.objective > 0.0 ? stats.mean / x.objective : 1.0;
    r.pass = stats.mean >= r.target - 3.0 * stats.se - 1e-12;
    r.extras["virtual_mean"] = mean_se(virt).mean;
    r.extras["domination_violations"] = static_cast<double>(violations);
    r.extras["max_played"] = static_cast<double>(max_played);
    r.extras["epsilon"] = epsilon;
    r.extras["tau_L"] = tau_L;
    return r;
}

}  // namespace mlsd
