#include "mtd/lp.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <stdexcept>

namespace mtd {

void LpProblem::set_bounds(std::size_t j, double lo, double hi) {
    if (j >= objective.size()) throw std::invalid_argument("set_bounds: variable out of range");
    if (lower.empty()) lower.assign(objective.size(), -kLpInfinity);
    if (upper.empty()) upper.assign(objective.size(), kLpInfinity);
    lower[j] = lo;
    upper[j] = hi;
}

std::string_view to_string(LpStatus status) {
    switch (status) {
        case LpStatus::optimal: return "optimal";
        case LpStatus::infeasible: return "infeasible";
        case LpStatus::unbounded: return "unbounded";
    }
    return "?";
}

namespace {

// How an original variable is expressed through nonnegative tableau columns.
struct VarMap {
    enum class Kind { shifted, flipped, split } kind;
    double offset;
    std::size_t col;
    std::size_t neg_col;  // split only
};

class Tableau {
public:
    Tableau(std::size_t rows, std::size_t cols)
        : m_(rows), n_(cols), cells_(rows * (cols + 1), 0.0), basis_(rows, 0), cost_(cols + 1, 0.0) {}

    double& at(std::size_t i, std::size_t j) { return cells_[i * (n_ + 1) + j]; }
    double at(std::size_t i, std::size_t j) const { return cells_[i * (n_ + 1) + j]; }
    double& rhs(std::size_t i) { return at(i, n_); }
    double rhs(std::size_t i) const { return at(i, n_); }
    std::size_t rows() const { return m_; }
    std::size_t cols() const { return n_; }
    std::vector<std::size_t>& basis() { return basis_; }
    const std::vector<std::size_t>& basis() const { return basis_; }

    // Reduced costs for the given column costs; cost_[n_] holds -objective.
    void price(const std::vector<double>& c) {
        for (std::size_t j = 0; j <= n_; ++j) {
            double v = j < n_ ? c[j] : 0.0;
            for (std::size_t i = 0; i < m_; ++i) v -= c[basis_[i]] * at(i, j);
            cost_[j] = v;
        }
    }

    double reduced_cost(std::size_t j) const { return cost_[j]; }
    double objective() const { return -cost_[n_]; }

    void pivot(std::size_t r, std::size_t c) {
        const double p = at(r, c);
        for (std::size_t j = 0; j <= n_; ++j) at(r, j) /= p;
        at(r, c) = 1.0;
        for (std::size_t i = 0; i < m_; ++i) {
            if (i == r) continue;
            const double f = at(i, c);
            if (f == 0.0) continue;
            for (std::size_t j = 0; j <= n_; ++j) {
                double& v = at(i, j);
                v -= f * at(r, j);
                if (std::abs(v) < 1e-14) v = 0.0;
            }
            at(i, c) = 0.0;
        }
        const double f = cost_[c];
        if (f != 0.0) {
            for (std::size_t j = 0; j <= n_; ++j) cost_[j] -= f * at(r, j);
            cost_[c] = 0.0;
        }
        basis_[r] = c;
    }

    void print(std::ostream& os) const {
        os << "tableau " << m_ << "x" << n_ << "\n";
        os << std::setprecision(6);
        for (std::size_t i = 0; i < m_; ++i) {
            os << "x" << basis_[i] << "\t|";
            for (std::size_t j = 0; j <= n_; ++j) os << ' ' << at(i, j);
            os << '\n';
        }
        os << "z\t|";
        for (std::size_t j = 0; j <= n_; ++j) os << ' ' << cost_[j];
        os << "\n";
    }

private:
    std::size_t m_;
    std::size_t n_;
    std::vector<double> cells_;
    std::vector<std::size_t> basis_;
    std::vector<double> cost_;
};

enum class PhaseResult { optimal, unbounded };

// Bland's rule: lowest-index entering column, lowest-index leaving basic variable.
PhaseResult run_simplex(Tableau& t, const std::vector<bool>& allowed, const LpOptions& opt, int& pivots) {
    const double tol = opt.feasibility_tol;
    for (;;) {
        std::size_t enter = t.cols();
        for (std::size_t j = 0; j < t.cols(); ++j) {
            if (allowed[j] && t.reduced_cost(j) < -tol) {
                enter = j;
                break;
            }
        }
        if (enter == t.cols()) return PhaseResult::optimal;

        std::size_t leave = t.rows();
        double best = 0.0;
        for (std::size_t i = 0; i < t.rows(); ++i) {
            const double a = t.at(i, enter);
            if (a <= tol) continue;
            const double ratio = std::max(t.rhs(i), 0.0) / a;
            if (leave == t.rows() || ratio < best - 1e-12) {
                best = ratio;
                leave = i;
            } else if (ratio <= best + 1e-12 && t.basis()[i] < t.basis()[leave]) {
                leave = i;
            }
        }
        if (leave == t.rows()) return PhaseResult::unbounded;
        if (++pivots > opt.max_pivots) throw std::runtime_error("simplex: pivot budget exhausted");
        t.pivot(leave, enter);
        if (opt.trace) t.print(*opt.trace);
    }
}

}  // namespace

LpSolution solve_lp(const LpProblem& problem, const LpOptions& options) {
    const std::size_t nx = problem.variables();
    if (nx == 0) throw std::invalid_argument("solve_lp: no variables");
    for (const auto& row : problem.rows) {
        if (row.coeffs.size() != nx) throw std::invalid_argument("solve_lp: row width differs from objective");
        if (std::isnan(row.bound)) throw std::invalid_argument("solve_lp: NaN bound");
    }
    if (!problem.lower.empty() && problem.lower.size() != nx)
        throw std::invalid_argument("solve_lp: lower bound vector has wrong size");
    if (!problem.upper.empty() && problem.upper.size() != nx)
        throw std::invalid_argument("solve_lp: upper bound vector has wrong size");
    for (double v : problem.lower)
        if (std::isnan(v)) throw std::invalid_argument("solve_lp: NaN bound");
    for (double v : problem.upper)
        if (std::isnan(v)) throw std::invalid_argument("solve_lp: NaN bound");

    LpSolution result;
    auto lower = [&](std::size_t j) { return problem.lower.empty() ? -kLpInfinity : problem.lower[j]; };
    auto upper = [&](std::size_t j) { return problem.upper.empty() ? kLpInfinity : problem.upper[j]; };

    // Map original variables onto nonnegative columns.
    std::vector<VarMap> map(nx);
    std::size_t ny = 0;
    std::vector<std::pair<std::size_t, double>> box_rows;  // column <= width
    for (std::size_t j = 0; j < nx; ++j) {
        const double lo = lower(j);
        const double hi = upper(j);
        if (lo > hi) return result;  // infeasible
        if (std::isfinite(lo)) {
            map[j] = {VarMap::Kind::shifted, lo, ny++, 0};
            if (std::isfinite(hi)) box_rows.emplace_back(map[j].col, hi - lo);
        } else if (std::isfinite(hi)) {
            map[j] = {VarMap::Kind::flipped, hi, ny++, 0};
        } else {
            map[j] = {VarMap::Kind::split, 0.0, ny, ny + 1};
            ny += 2;
        }
    }

    // Rows over y: a . y <= b.
    std::vector<std::vector<double>> a_rows;
    std::vector<double> b_rows;
    for (const auto& row : problem.rows) {
        std::vector<double> ay(ny, 0.0);
        double b = row.bound;
        for (std::size_t j = 0; j < nx; ++j) {
            const double v = row.coeffs[j];
            switch (map[j].kind) {
                case VarMap::Kind::shifted:
                    ay[map[j].col] += v;
                    b -= v * map[j].offset;
                    break;
                case VarMap::Kind::flipped:
                    ay[map[j].col] -= v;
                    b -= v * map[j].offset;
                    break;
                case VarMap::Kind::split:
                    ay[map[j].col] += v;
                    ay[map[j].neg_col] -= v;
                    break;
            }
        }
        a_rows.push_back(std::move(ay));
        b_rows.push_back(b);
    }
    for (const auto& [col, width] : box_rows) {
        std::vector<double> ay(ny, 0.0);
        ay[col] = 1.0;
        a_rows.push_back(std::move(ay));
        b_rows.push_back(width);
    }

    std::vector<double> cy(ny, 0.0);
    for (std::size_t j = 0; j < nx; ++j) {
        const double c = problem.objective[j];
        switch (map[j].kind) {
            case VarMap::Kind::shifted: cy[map[j].col] += c; break;
            case VarMap::Kind::flipped: cy[map[j].col] -= c; break;
            case VarMap::Kind::split:
                cy[map[j].col] += c;
                cy[map[j].neg_col] -= c;
                break;
        }
    }

    const std::size_t m = a_rows.size();
    std::size_t n_art = 0;
    for (double b : b_rows) n_art += b < 0.0;
    const std::size_t slack0 = ny;
    const std::size_t art0 = ny + m;
    const std::size_t ncols = ny + m + n_art;

    Tableau t(m, ncols);
    double b_scale = 1.0;
    std::size_t next_art = art0;
    for (std::size_t i = 0; i < m; ++i) {
        const bool negate = b_rows[i] < 0.0;
        const double sign = negate ? -1.0 : 1.0;
        for (std::size_t j = 0; j < ny; ++j) t.at(i, j) = sign * a_rows[i][j];
        t.at(i, slack0 + i) = sign;
        t.rhs(i) = sign * b_rows[i];
        b_scale = std::max(b_scale, std::abs(b_rows[i]));
        if (negate) {
            t.at(i, next_art) = 1.0;
            t.basis()[i] = next_art++;
        } else {
            t.basis()[i] = slack0 + i;
        }
    }

    std::vector<bool> allowed(ncols, true);
    if (n_art > 0) {
        std::vector<double> phase1(ncols, 0.0);
        for (std::size_t j = art0; j < ncols; ++j) phase1[j] = 1.0;
        t.price(phase1);
        run_simplex(t, allowed, options, result.pivots);
        if (t.objective() > options.feasibility_tol * b_scale) return result;  // infeasible

        // Drive remaining (zero-valued) artificials out of the basis where possible.
        for (std::size_t i = 0; i < m; ++i) {
            if (t.basis()[i] < art0) continue;
            std::size_t best = ncols;
            double best_abs = options.feasibility_tol;
            for (std::size_t j = 0; j < art0; ++j) {
                if (std::abs(t.at(i, j)) > best_abs) {
                    best_abs = std::abs(t.at(i, j));
                    best = j;
                }
            }
            if (best != ncols) {
                t.pivot(i, best);
                ++result.pivots;
            }
        }
        for (std::size_t j = art0; j < ncols; ++j) allowed[j] = false;
    }

    std::vector<double> phase2(ncols, 0.0);
    std::copy(cy.begin(), cy.end(), phase2.begin());
    t.price(phase2);
    if (run_simplex(t, allowed, options, result.pivots) == PhaseResult::unbounded) {
        result.status = LpStatus::unbounded;
        return result;
    }

    std::vector<double> y(ncols, 0.0);
    for (std::size_t i = 0; i < m; ++i) y[t.basis()[i]] = std::max(t.rhs(i), 0.0);
    result.x.assign(nx, 0.0);
    for (std::size_t j = 0; j < nx; ++j) {
        switch (map[j].kind) {
            case VarMap::Kind::shifted: result.x[j] = map[j].offset + y[map[j].col]; break;
            case VarMap::Kind::flipped: result.x[j] = map[j].offset - y[map[j].col]; break;
            case VarMap::Kind::split: result.x[j] = y[map[j].col] - y[map[j].neg_col]; break;
        }
    }
    result.objective_value = 0.0;
    for (std::size_t j = 0; j < nx; ++j) result.objective_value += problem.objective[j] * result.x[j];
    result.status = LpStatus::optimal;
    return result;
}

double max_violation(const LpProblem& problem, const std::vector<double>& x) {
    double worst = 0.0;
    for (const auto& row : problem.rows) {
        double lhs = 0.0;
        for (std::size_t j = 0; j < x.size(); ++j) lhs += row.coeffs[j] * x[j];
        worst = std::max(worst, lhs - row.bound);
    }
    for (std::size_t j = 0; j < x.size(); ++j) {
        if (!problem.lower.empty()) worst = std::max(worst, problem.lower[j] - x[j]);
        if (!problem.upper.empty()) worst = std::max(worst, x[j] - problem.upper[j]);
    }
    return worst;
}

}  // namespace mtd
