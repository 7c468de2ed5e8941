#pragma once
// Dense tableau simplex for   max c'x  s.t.  Ax <= b, x >= 0  with b >= 0.
// The origin is feasible, so no phase one is needed. Bland's rule keeps
// degenerate pivots from cycling; the problems solved here have at most a
// few hundred columns.

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace mlsd {

struct DenseLp {
    std::vector<double> objective;                // c, one entry per column
    std::vector<std::vector<double>> rows;        // A, one vector per constraint
    std::vector<double> rhs;                      // b >= 0

    std::size_t columns() const { return objective.size(); }
    std::size_t constraints() const { return rows.size(); }
};

enum class LpStatus { Optimal, Unbounded, IterationLimit };

inline const char* to_string(LpStatus status) {
    switch (status) {
        case LpStatus::Optimal: return "optimal";
        case LpStatus::Unbounded: return "unbounded";
        case LpStatus::IterationLimit: return "iteration limit";
    }
    return "unknown";
}

struct LpResult {
    LpStatus status = LpStatus::Optimal;
    std::vector<double> x;
    double objective = 0.0;
    std::size_t iterations = 0;
};

template <class Backend>
concept LpBackend = requires(const Backend& backend, const DenseLp& lp) {
    { backend.solve(lp) } -> std::same_as<LpResult>;
};

class DenseSimplex {
public:
    double pivot_tolerance = 1e-12;
    std::size_t max_iterations = 100000;

    LpResult solve(const DenseLp& lp) const {
        const std::size_t m = lp.constraints();
        const std::size_t n = lp.columns();
        if (lp.rhs.size() != m) throw std::invalid_argument("rhs size does not match constraint count");
        for (const auto& row : lp.rows)
            if (row.size() != n) throw std::invalid_argument("constraint row has wrong width");
        for (double b : lp.rhs)
            if (b < 0.0) throw std::invalid_argument("DenseSimplex requires b >= 0");

        const std::size_t width = n + m + 1;  // structural, slack, rhs
        std::vector<double> tab((m + 1) * width, 0.0);
        auto at = [&](std::size_t r, std::size_t c) -> double& { return tab[r * width + c]; };

        std::vector<std::size_t> basis(m);
        for (std::size_t r = 0; r < m; ++r) {
            for (std::size_t c = 0; c < n; ++c) at(r, c) = lp.rows[r][c];
            at(r, n + r) = 1.0;
            at(r, width - 1) = lp.rhs[r];
            basis[r] = n + r;
        }
        for (std::size_t c = 0; c < n; ++c) at(m, c) = -lp.objective[c];

        LpResult result;
        for (;;) {
            if (result.iterations >= max_iterations) {
                result.status = LpStatus::IterationLimit;
                return result;
            }
            // Bland: lowest-index column with negative reduced cost enters.
            std::size_t entering = width;
            for (std::size_t c = 0; c + 1 < width; ++c) {
                if (at(m, c) < -pivot_tolerance) {
                    entering = c;
                    break;
                }
            }
            if (entering == width) break;

            std::size_t leaving = m;
            double best_ratio = 0.0;
            for (std::size_t r = 0; r < m; ++r) {
                const double a = at(r, entering);
                if (a <= pivot_tolerance) continue;
                const double ratio = at(r, width - 1) / a;
                if (leaving == m || ratio < best_ratio - 1e-15 ||
                    (std::abs(ratio - best_ratio) <= 1e-15 && basis[r] < basis[leaving])) {
                    leaving = r;
                    best_ratio = ratio;
                }
            }
            if (leaving == m) {
                result.status = LpStatus::Unbounded;
                return result;
            }

            const double pivot = at(leaving, entering);
            for (std::size_t c = 0; c < width; ++c) at(leaving, c) /= pivot;
            for (std::size_t r = 0; r <= m; ++r) {
                if (r == leaving) continue;
                const double factor = at(r, entering);
                if (factor == 0.0) continue;
                for (std::size_t c = 0; c < width; ++c) at(r, c) -= factor * at(leaving, c);
                at(r, entering) = 0.0;
            }
            basis[leaving] = entering;
            ++result.iterations;
        }

        result.x.assign(n, 0.0);
        for (std::size_t r = 0; r < m; ++r) {
            if (basis[r] < n) result.x[basis[r]] = std::max(0.0, at(r, width - 1));
        }
        result.objective = 0.0;
        for (std::size_t c = 0; c < n; ++c) result.objective += lp.objective[c] * result.x[c];
        result.status = LpStatus::Optimal;
        return result;
    }
};

static_assert(LpBackend<DenseSimplex>);

}  // namespace mlsd
