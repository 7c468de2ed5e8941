#pragma once
// Interval-occupancy LP. Variable x(i,u,l) is the fraction of time arm i spends
// in recurrent interval I(u,l), for u in 1..tau_max and l in tau_L..-1:
//
//   max   sum q_i(u,l) x(i,u,l)
//   s.t.  sum (-l) x(i,u,l)        <= k     (play budget)
//         sum_{u,l} (u-l) x(i,u,l) <= 1     (per arm: intervals do not overlap)
//         x >= 0

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "core_model.hpp"
#include "intervals.hpp"
#include "simplex.hpp"

namespace mlsd {

/// Maps (arm, u, l) to a dense column index: arm-major, then u ascending,
/// then l descending from -1.
struct IntervalGrid {
    std::size_t n = 0;
    int tau_max = 1;
    int tau_L = -1;

    std::size_t uppers() const { return static_cast<std::size_t>(tau_max); }
    std::size_t lowers() const { return static_cast<std::size_t>(-tau_L); }
    std::size_t size() const { return n * uppers() * lowers(); }

    std::size_t index(ArmIndex arm, int u, int l) const {
        if (arm >= n || u < 1 || u > tau_max || l > -1 || l < tau_L)
            throw std::out_of_range("interval variable (" + std::to_string(arm) + ", " +
                                    std::to_string(u) + ", " + std::to_string(l) +
                                    ") outside the grid");
        return (arm * uppers() + static_cast<std::size_t>(u - 1)) * lowers() +
               static_cast<std::size_t>(-l - 1);
    }

    template <class Fn>
    void for_each(Fn&& fn) const {
        std::size_t j = 0;
        for (ArmIndex arm = 0; arm < n; ++arm)
            for (int u = 1; u <= tau_max; ++u)
                for (int l = -1; l >= tau_L; --l) fn(j++, arm, u, l);
    }

    friend bool operator==(const IntervalGrid&, const IntervalGrid&) = default;
};

/// The LP in dense form plus the grid that names its columns. Row 0 is the
/// play budget, row 1 + i the packing constraint of arm i.
struct LpDescription {
    IntervalGrid grid;
    DenseLp lp;
};

inline LpDescription build_lp(const Instance& instance, int tau_L) {
    if (tau_L > -1) throw std::invalid_argument("tau_L must be <= -1");
    LpDescription out;
    out.grid = IntervalGrid{instance.n(), instance.tau_max(), tau_L};
    const std::size_t columns = out.grid.size();
    out.lp.objective.assign(columns, 0.0);
    out.lp.rows.assign(1 + instance.n(), std::vector<double>(columns, 0.0));
    out.lp.rhs.assign(1 + instance.n(), 1.0);
    out.lp.rhs[0] = static_cast<double>(instance.k());
    out.grid.for_each([&](std::size_t j, ArmIndex arm, int u, int l) {
        out.lp.objective[j] = aggregated_payoff(instance, arm, RecurrentInterval(u, l));
        out.lp.rows[0][j] = static_cast<double>(-l);
        out.lp.rows[1 + arm][j] = static_cast<double>(u - l);
    });
    return out;
}

class LpSolverError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct LpSolution {
    IntervalGrid grid;
    std::vector<double> x;
    double objective = 0.0;

    int tau_L() const { return grid.tau_L; }
    double operator()(ArmIndex arm, int u, int l) const { return x[grid.index(arm, u, l)]; }

    /// Sum over (u,l) of (u-l) x(i,u,l): the probability arm i receives an interval.
    double arm_mass(ArmIndex arm) const {
        double mass = 0.0;
        for (int u = 1; u <= grid.tau_max; ++u)
            for (int l = -1; l >= grid.tau_L; --l) mass += (u - l) * (*this)(arm, u, l);
        return mass;
    }
};

/// Entries below this are treated as zero when cleaning solver output.
inline constexpr double kLpZeroTolerance = 1e-13;

template <LpBackend Backend = DenseSimplex>
LpSolution solve_lp(const LpDescription& description, const Backend& backend = Backend{}) {
    LpResult result = backend.solve(description.lp);
    if (result.status != LpStatus::Optimal)
        throw LpSolverError(std::string("LP solver failed: ") + to_string(result.status));
    LpSolution solution;
    solution.grid = description.grid;
    solution.x = std::move(result.x);
    for (double& v : solution.x)
        if (v < kLpZeroTolerance) v = 0.0;
    solution.objective = 0.0;
    for (std::size_t j = 0; j < solution.x.size(); ++j)
        solution.objective += description.lp.objective[j] * solution.x[j];
    return solution;
}

/// tau_L = -ceil(1/epsilon).
inline int tau_L_for_epsilon(double epsilon) {
    if (!(epsilon > 0.0 && epsilon < 1.0)) throw std::invalid_argument("epsilon must lie in (0,1)");
    return -static_cast<int>(std::ceil(1.0 / epsilon - 1e-12));
}

struct FeasibilityReport {
    bool feasible = true;
    double max_violation = 0.0;
    double budget_violation = 0.0;
    double packing_violation = 0.0;
    double negativity = 0.0;
};

inline FeasibilityReport check_feasible(const LpSolution& solution, const Instance& instance,
                                        double tolerance) {
    const IntervalGrid& g = solution.grid;
    if (g.n != instance.n() || g.tau_max != instance.tau_max() || solution.x.size() != g.size())
        throw std::invalid_argument("LP solution shape does not match the instance");
    FeasibilityReport report;
    double budget = 0.0;
    std::vector<double> packing(g.n, 0.0);
    g.for_each([&](std::size_t j, ArmIndex arm, int u, int l) {
        const double v = solution.x[j];
        report.negativity = std::max(report.negativity, -v);
        budget += -l * v;
        packing[arm] += (u - l) * v;
    });
    report.budget_violation = std::max(0.0, budget - static_cast<double>(instance.k()));
    for (double p : packing) report.packing_violation = std::max(report.packing_violation, p - 1.0);
    report.max_violation =
        std::max({report.budget_violation, report.packing_violation, report.negativity, 0.0});
    report.feasible = report.max_violation <= tolerance;
    return report;
}

}  // namespace mlsd
