#pragma once

#include <iosfwd>
#include <limits>
#include <string_view>
#include <vector>

namespace mtd {

inline constexpr double kLpInfinity = std::numeric_limits<double>::infinity();

struct LpRow {
    std::vector<double> coeffs;
    double bound = 0.0;  // coeffs . x <= bound
};

/// minimize objective . x  subject to  rows, lower <= x <= upper.
/// Empty lower/upper vectors mean every variable is free.
struct LpProblem {
    std::vector<double> objective;
    std::vector<LpRow> rows;
    std::vector<double> lower;
    std::vector<double> upper;

    std::size_t variables() const { return objective.size(); }
    void add_row(std::vector<double> coeffs, double bound) { rows.push_back({std::move(coeffs), bound}); }
    void set_bounds(std::size_t j, double lo, double hi);
};

enum class LpStatus { optimal, infeasible, unbounded };

std::string_view to_string(LpStatus status);

struct LpSolution {
    LpStatus status = LpStatus::infeasible;
    std::vector<double> x;
    double objective_value = 0.0;
    int pivots = 0;
};

struct LpOptions {
    double feasibility_tol = 1e-9;
    int max_pivots = 100000;
    /// When set, the tableau is printed after every pivot.
    std::ostream* trace = nullptr;
};

/// Dense two-phase primal simplex with Bland's rule.
/// Deterministic for a given problem; throws std::invalid_argument on
/// malformed input and std::runtime_error if the pivot budget is exhausted.
LpSolution solve_lp(const LpProblem& problem, const LpOptions& options = {});

/// Largest violation of any row or bound by x (0 when feasible).
double max_violation(const LpProblem& problem, const std::vector<double>& x);

}  // namespace mtd
