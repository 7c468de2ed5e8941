#pragma once
// Independent LP value for tests. Relaxing the play budget with a multiplier
// lambda >= 0 leaves one knapsack row per arm, whose optimum is the best
// ratio (q - lambda(-l)) / (u - l) or zero:
//
//   LP* = min_{lambda >= 0}  k lambda + sum_i max(0, max_{u,l} (q - lambda(-l)) / (u - l))
//
// The function is convex and piecewise linear, so its minimum sits at a
// breakpoint; every breakpoint is enumerated.

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "mlsd/core_model.hpp"
#include "mlsd/intervals.hpp"

namespace mlsd::testing {

struct Column {
    double q, a, c;  // payoff, budget use (-l), length (u - l)
};

inline double dual_value(double lambda, double k, const std::vector<std::vector<Column>>& arms) {
    double v = k * lambda;
    for (const auto& cols : arms) {
        double best = 0.0;
        for (const auto& col : cols) best = std::max(best, (col.q - lambda * col.a) / col.c);
        v += best;
    }
    return v;
}

inline double lp_value_by_duality(const Instance& instance, int tau_L) {
    std::vector<std::vector<Column>> arms(instance.n());
    for (ArmIndex i = 0; i < instance.n(); ++i)
        for (int u = 1; u <= instance.tau_max(); ++u)
            for (int l = -1; l >= tau_L; --l) {
                // q summed directly from the table, not via aggregated_payoff
                double q = instance.table(i)(u);
                for (int tau = l + 1; tau <= -1; ++tau) q += instance.table(i)(tau);
                arms[i].push_back({q, static_cast<double>(-l), static_cast<double>(u - l)});
            }
    std::vector<double> breakpoints{0.0};
    for (const auto& cols : arms) {
        for (std::size_t a = 0; a < cols.size(); ++a) {
            breakpoints.push_back(cols[a].q / cols[a].a);
            for (std::size_t b = a + 1; b < cols.size(); ++b) {
                const double den = cols[a].a / cols[a].c - cols[b].a / cols[b].c;
                if (std::abs(den) < 1e-15) continue;
                breakpoints.push_back((cols[a].q / cols[a].c - cols[b].q / cols[b].c) / den);
            }
        }
    }
    double best = std::numeric_limits<double>::infinity();
    for (double lambda : breakpoints)
        if (lambda >= 0.0) best = std::min(best, dual_value(lambda, static_cast<double>(instance.k()), arms));
    return best;
}

}  // namespace mlsd::testing
