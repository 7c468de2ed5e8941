// mlsd: command-line front end for instance generation, LP solving, planning,
// simulation, exact optimization, learning runs and experiments.

#include <cmath>
#include <cstdint>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mlsd/mlsd.hpp"

namespace {

using namespace mlsd;

enum ExitCode : int {
    kOk = 0,
    kFailure = 1,
    kBudget = 3,
    kHorizon = 4,
    kInput = 5,
    kCriterionFailed = 6,
    kFile = 7,
};

struct Options {
    std::string instance;
    std::string out;
    std::uint64_t seed = 1;
    long long T = 100;
    double epsilon = 0.5;
    std::size_t k = 1;
    int m = 2;
    double budget = kDefaultDpBudget;

    std::string generator = "random";
    std::size_t n = 3;
    int tau_max = 3;
    int tau_min = -2;

    std::size_t seeds = 30;
    std::string kind = "approximation";
    int criterion = 0;
    std::string series = "ratio-vs-m";
    double eta = 0.05;
    std::string csv;
};

/// Writes to --out, or stdout when no path was given.
void emit(const Options& o, const std::string& content) {
    if (o.out.empty()) std::cout << content;
    else write_text_file(o.out, content);
}

Instance require_instance(const Options& o) {
    if (o.instance.empty()) throw std::runtime_error("--instance is required");
    return load_instance(o.instance);
}

int cmd_gen(const Options& o) {
    Instance inst;
    if (o.generator == "random") {
        if (o.n < 1) throw std::invalid_argument("--n must be >= 1");
        Rng rng = make_stream(o.seed, Stream::Instance);
        inst = random_monotone_instance(o.n, o.k, o.tau_min, o.tau_max, rng);
    } else if (o.generator == "threshold" || o.generator == "appendix-c1") {
        inst = make_tight_instance(o.k, o.m);
    } else if (o.generator == "single-arm" || o.generator == "appendix-c2") {
        inst = make_single_arm_instance();
    } else {
        throw std::invalid_argument("unknown generator '" + o.generator +
                                    "' (expected random, threshold or single-arm)");
    }
    emit(o, to_json(inst).dump(2) + "\n");
    std::cerr << "generated " << o.generator << ": n=" << inst.n() << " k=" << inst.k() << " tau_min="
              << inst.tau_min() << " tau_max=" << inst.tau_max() << "\n";
    return kOk;
}

int cmd_solve_lp(const Options& o) {
    const Instance inst = require_instance(o);
    const int tau_L = tau_L_for_epsilon(o.epsilon);
    const LpSolution x = solve_lp(build_lp(inst, tau_L));
    emit(o, to_json(x).dump(2) + "\n");
    std::cerr << "tau_L=" << tau_L << " LP*=" << format_double(x.objective) << "\n";
    return kOk;
}

PlannerState build_planner(const Options& o, const LpSolution& x) {
    Rng rounding = make_stream(o.seed, Stream::Rounding);
    Rng offsets = make_stream(o.seed, Stream::Offsets);
    return make_planner(x, rounding, offsets);
}

int cmd_plan(const Options& o) {
    const Instance inst = require_instance(o);
    const int tau_L = tau_L_for_epsilon(o.epsilon);
    const LpSolution x = solve_lp(build_lp(inst, tau_L));
    const PlannerState p = build_planner(o, x);
    Json arms = Json::array();
    for (ArmIndex i = 0; i < p.arms.size(); ++i) {
        const PlannedArm& a = p.arms[i];
        Json entry{{"arm", i}};
        if (a.interval) {
            entry["interval"] = to_json(*a.interval);
            entry["offset"] = a.offset;
            entry["virtual_state"] = a.virtual_state;
        } else {
            entry["interval"] = nullptr;
        }
        arms.push_back(entry);
    }
    const Json plan{{"seed", o.seed}, {"epsilon", o.epsilon}, {"tau_L", tau_L},
                    {"lp_objective", x.objective}, {"arms", arms}};
    emit(o, plan.dump(2) + "\n");
    std::cerr << "tau_L=" << tau_L << " LP*=" << format_double(x.objective) << " active arms=" << p.active.size()
              << "\n";
    return kOk;
}

int cmd_simulate(const Options& o) {
    const Instance inst = require_instance(o);
    const int tau_L = tau_L_for_epsilon(o.epsilon);
    const LpSolution x = solve_lp(build_lp(inst, tau_L));
    CoSimulationOptions opts;
    opts.rounds = o.T;
    opts.record_trace = true;
    const auto run = co_simulate(build_planner(o, x), inst, inst, opts);
    std::ostringstream csv;
    write_trace_csv(csv, run.trace, inst.n());
    emit(o, csv.str());
    double actual = 0.0, virt = 0.0;
    for (double v : run.actual_payoffs) actual += v;
    for (double v : run.virtual_payoffs) virt += v;
    std::cerr << "T=" << o.T << " total=" << format_double(actual) << " virtual_total=" << format_double(virt)
              << " per_round=" << format_double(o.T > 0 ? actual / static_cast<double>(o.T) : 0.0)
              << " domination_violations=" << run.domination_violations << "\n";
    return kOk;
}

int cmd_oracle(const Options& o) {
    const Instance inst = require_instance(o);
    const OracleResult r = dp_optimal(inst, o.T, o.budget);
    std::ostringstream csv;
    write_schedule_csv(csv, r.schedule);
    if (!o.out.empty()) write_text_file(o.out, csv.str());
    std::cout << "OPT=" << format_double(r.value) << "\n";
    return kOk;
}

int cmd_learn(const Options& o) {
    const Instance truth = require_instance(o);
    const InstanceShape shape = InstanceShape::of(truth);
    const RegretReference ref = regret_reference(truth, o.T, tau_L_for_epsilon(o.epsilon), o.budget);
    const auto records = parallel_map<EtcRecord>(o.seeds, [&](std::size_t s) {
        const std::uint64_t seed = o.seed + s;
        BernoulliEnvironment env(truth, make_stream(seed, Stream::PayoffNoise));
        return etc_run(env, shape, o.T, o.epsilon, seed, ref);
    });
    std::ostringstream csv;
    write_regret_header(csv);
    std::vector<double> regrets;
    for (const auto& r : records) {
        write_regret_row(csv, r);
        regrets.push_back(r.regret);
    }
    emit(o, csv.str());
    const MeanSe st = mean_se(regrets);
    std::cerr << "T=" << o.T << " m=" << records.front().m << " eta=" << format_double(records.front().eta)
              << " exploration_length=" << records.front().exploration_length
              << " reference=" << format_double(ref.value) << " (" << to_string(ref.kind) << ")"
              << " mean_Reg=" << format_double(st.mean) << " se=" << format_double(st.se) << "\n";
    return kOk;
}

int cmd_experiment(const Options& o) {
    if (o.kind == "acceptance") {
        std::vector<int> ids;
        if (o.criterion > 0) ids.push_back(o.criterion);
        else
            for (int i = 1; i <= acceptance::kCriterionCount; ++i) ids.push_back(i);
        bool all = true;
        Json results = Json::array();
        for (int id : ids) {
            const auto r = acceptance::run(id);
            all = all && r.pass;
            std::cout << "criterion " << r.id << " " << (r.pass ? "PASS" : "FAIL") << " (" << r.name << ", "
                      << format_double(r.seconds) << " s): " << r.detail << "\n";
            results.push_back(Json{{"criterion", r.id}, {"name", r.name}, {"pass", r.pass},
                                   {"seconds", r.seconds}, {"detail", r.detail}});
        }
        if (!o.out.empty()) write_text_file(o.out, results.dump(2) + "\n");
        return all ? kOk : kCriterionFailed;
    }

    std::vector<ExperimentReport> reports;
    if (o.kind == "approximation") {
        const Instance inst = require_instance(o);
        reports.push_back(approximation_experiment(inst, o.epsilon, o.T, o.seeds, o.seed, o.instance));
    } else if (o.kind == "tightness") {
        reports.push_back(tightness_experiment(o.k, o.m, o.T, o.seeds, o.seed));
    } else if (o.kind == "robustness") {
        const Instance inst = require_instance(o);
        const RobustnessResult r = robustness_gap(inst, o.eta, o.seeds, o.seed, o.epsilon, o.T);
        ExperimentReport rep;
        rep.name = "robustness";
        rep.instance = o.instance;
        rep.seeds = r.trials;
        rep.horizon = o.T;
        rep.mean = r.mean_gap;
        rep.se = r.se;
        rep.reference = o.eta * static_cast<double>(inst.k());
        rep.reference_kind = "eta_k";
        rep.gamma = gamma_k(inst.k());
        rep.target = rep.reference;
        rep.ratio = r.fitted_c;
        rep.pass = true;
        rep.extras["eta"] = r.eta;
        rep.extras["fitted_c"] = r.fitted_c;
        reports.push_back(rep);
    } else {
        throw std::invalid_argument("unknown experiment kind '" + o.kind +
                                    "' (expected approximation, tightness, robustness or acceptance)");
    }
    Json out = Json::array();
    for (const auto& r : reports) out.push_back(to_json(r));
    emit(o, out.dump(2) + "\n");
    if (!o.csv.empty()) {
        std::ostringstream csv;
        write_report_csv(csv, reports);
        write_text_file(o.csv, csv.str());
    }
    for (const auto& r : reports)
        std::cerr << r.name << ": mean=" << format_double(r.mean) << " se=" << format_double(r.se)
                  << " target=" << format_double(r.target) << " pass=" << (r.pass ? "yes" : "no") << "\n";
    return kOk;
}

int cmd_plot_data(const Options& o) {
    std::ostringstream csv;
    if (o.series == "ratio-vs-m") {
        csv << "series,x,y,se,reference\n";
        for (int m : {2, 5, 10, 20, 50, 100}) {
            const ExperimentReport r = tightness_experiment(o.k, m, std::max<long long>(o.T, 100LL * m), o.seeds,
                                                            o.seed);
            csv << "ratio_vs_m," << m << ',' << format_double(r.mean) << ',' << format_double(r.se) << ','
                << format_double(r.gamma) << '\n';
        }
    } else if (o.series == "regret-vs-T") {
        csv << "series,x,y,se,reference\n";
        std::vector<long long> horizons;
        for (int e = 10; e <= 16; ++e) horizons.push_back(1LL << e);
        for (const auto& p : acceptance::regret_curve(horizons, o.seeds, o.epsilon, o.seed))
            csv << "regret_vs_T," << p.T << ',' << format_double(p.mean_regret) << ',' << format_double(p.se)
                << ',' << format_double(p.reference) << '\n';
    } else {
        throw std::invalid_argument("unknown series '" + o.series + "' (expected ratio-vs-m or regret-vs-T)");
    }
    emit(o, csv.str());
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Planning and learning for last-switch-dependent bandits"};
    app.require_subcommand(1);
    Options o;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--seed", o.seed, "Run seed");
        sub->add_option("--out", o.out, "Output file (stdout when omitted)");
    };
    auto add_instance = [&](CLI::App* sub) { sub->add_option("--instance", o.instance, "Instance JSON file"); };

    auto* gen = app.add_subcommand("gen", "Generate an instance file");
    gen->add_option("generator", o.generator, "random | threshold | single-arm")->required();
    gen->add_option("--n", o.n, "Arm count (random)");
    gen->add_option("--k", o.k, "Per-round budget");
    gen->add_option("--m", o.m, "Threshold state (threshold)");
    gen->add_option("--tau-max", o.tau_max, "Upper saturation state (random)");
    gen->add_option("--tau-min", o.tau_min, "Lower saturation state (random)");
    add_common(gen);

    auto* lp = app.add_subcommand("solve-lp", "Solve the interval LP");
    add_instance(lp);
    lp->add_option("--epsilon", o.epsilon, "Accuracy; tau_L = -ceil(1/epsilon)");
    add_common(lp);

    auto* plan = app.add_subcommand("plan", "Draw intervals and offsets");
    add_instance(plan);
    plan->add_option("--epsilon", o.epsilon, "Accuracy; tau_L = -ceil(1/epsilon)");
    add_common(plan);

    auto* sim = app.add_subcommand("simulate", "Run the planner and write its trace");
    add_instance(sim);
    sim->add_option("--epsilon", o.epsilon, "Accuracy; tau_L = -ceil(1/epsilon)");
    sim->add_option("--T", o.T, "Rounds");
    add_common(sim);

    auto* oracle = app.add_subcommand("oracle", "Exact optimum by dynamic programming");
    add_instance(oracle);
    oracle->add_option("--T", o.T, "Horizon");
    oracle->add_option("--budget", o.budget, "Maximum state-action evaluations");
    add_common(oracle);

    auto* learn = app.add_subcommand("learn", "Explore-then-commit runs with Bernoulli rewards");
    add_instance(learn);
    learn->add_option("--T", o.T, "Horizon");
    learn->add_option("--epsilon", o.epsilon, "Accuracy; tau_L = -ceil(1/epsilon)");
    learn->add_option("--seeds", o.seeds, "Number of seeds, starting at --seed");
    learn->add_option("--budget", o.budget, "Oracle budget for the regret reference");
    add_common(learn);

    auto* exp = app.add_subcommand("experiment", "Experiments and acceptance checks");
    exp->add_option("--kind", o.kind, "approximation | tightness | robustness | acceptance");
    add_instance(exp);
    exp->add_option("--T", o.T, "Horizon");
    exp->add_option("--epsilon", o.epsilon, "Accuracy; tau_L = -ceil(1/epsilon)");
    exp->add_option("--k", o.k, "Per-round budget (tightness)");
    exp->add_option("--m", o.m, "Threshold state (tightness)");
    exp->add_option("--eta", o.eta, "Perturbation size (robustness)");
    exp->add_option("--seeds", o.seeds, "Number of seeds, starting at --seed");
    exp->add_option("--criterion", o.criterion, "Acceptance criterion 1-10 (all when omitted)");
    exp->add_option("--csv", o.csv, "Also write the report as CSV");
    add_common(exp);

    auto* plot = app.add_subcommand("plot-data", "Emit (x, y) series");
    plot->add_option("--series", o.series, "ratio-vs-m | regret-vs-T");
    plot->add_option("--k", o.k, "Per-round budget (ratio-vs-m)");
    plot->add_option("--T", o.T, "Minimum horizon (ratio-vs-m)");
    plot->add_option("--epsilon", o.epsilon, "Accuracy (regret-vs-T)");
    plot->add_option("--seeds", o.seeds, "Seeds per point");
    add_common(plot);

    CLI11_PARSE(app, argc, argv);

    try {
        if (gen->parsed()) return cmd_gen(o);
        if (lp->parsed()) return cmd_solve_lp(o);
        if (plan->parsed()) return cmd_plan(o);
        if (sim->parsed()) return cmd_simulate(o);
        if (oracle->parsed()) return cmd_oracle(o);
        if (learn->parsed()) return cmd_learn(o);
        if (exp->parsed()) return cmd_experiment(o);
        if (plot->parsed()) return cmd_plot_data(o);
    } catch (const OracleBudgetExceeded& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kBudget;
    } catch (const ExplorationTooShort& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kHorizon;
    } catch (const FileError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kFile;
    } catch (const FormatError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kInput;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kFailure;
    }
    return kFailure;
}
