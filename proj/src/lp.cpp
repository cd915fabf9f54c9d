#include "kam/lp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "kam/types.hpp"

namespace kam {

namespace {

// Tableau state for the standard-form problem
//   max c.z  s.t.  T z = rhs, z >= 0
// after surplus variables have been appended for the >= rows.
struct Tableau {
    std::size_t rows = 0;
    std::size_t cols = 0;  // structural + surplus columns (rhs kept separately)
    std::vector<std::vector<double>> a;
    std::vector<double> rhs;
    std::vector<int> basis;  // basic column per row; artificials get cols + i
};

void check_well_formed(const LinearProgram& lp) {
    const std::size_t nv = lp.variable_count();
    auto check_block = [&](const std::vector<std::vector<double>>& lhs,
                           const std::vector<double>& rhs, const char* what) {
        if (lhs.size() != rhs.size())
            throw std::invalid_argument(std::string("lp: ") + what +
                                        " lhs/rhs row counts differ");
        for (const auto& row : lhs) {
            if (row.size() != nv)
                throw std::invalid_argument(std::string("lp: ") + what +
                                            " row width does not match variable count");
            for (double v : row)
                if (!std::isfinite(v))
                    throw std::invalid_argument("lp: non-finite coefficient");
        }
        for (double v : rhs)
            if (!std::isfinite(v))
                throw std::invalid_argument("lp: non-finite rhs entry");
    };
    for (double v : lp.objective)
        if (!std::isfinite(v)) throw std::invalid_argument("lp: non-finite objective");
    check_block(lp.eq_lhs, lp.eq_rhs, "equality");
    check_block(lp.ge_lhs, lp.ge_rhs, "inequality");
}

void pivot(Tableau& t, std::vector<double>& reduced, double& obj_value,
           std::size_t prow, std::size_t pcol, std::size_t total_cols) {
    const double inv = 1.0 / t.a[prow][pcol];
    for (std::size_t j = 0; j < total_cols; ++j) t.a[prow][j] *= inv;
    t.rhs[prow] *= inv;
    t.a[prow][pcol] = 1.0;  // kill residual rounding on the pivot element

    for (std::size_t i = 0; i < t.rows; ++i) {
        if (i == prow) continue;
        const double f = t.a[i][pcol];
        if (f == 0.0) continue;
        for (std::size_t j = 0; j < total_cols; ++j) t.a[i][j] -= f * t.a[prow][j];
        t.a[i][pcol] = 0.0;
        t.rhs[i] -= f * t.rhs[prow];
    }
    const double f = reduced[pcol];
    if (f != 0.0) {
        for (std::size_t j = 0; j < total_cols; ++j) reduced[j] -= f * t.a[prow][j];
        reduced[pcol] = 0.0;
        obj_value += f * t.rhs[prow];
    }
    t.basis[prow] = static_cast<int>(pcol);
}

// Maximizing simplex over the current basis. `allowed` limits entering
// columns (used in phase 2 to lock out artificial columns). Returns false
// when an improving column has no positive pivot entry (unbounded).
bool run_simplex(Tableau& t, std::vector<double>& reduced, double& obj_value,
                 std::size_t total_cols, std::size_t allowed_cols, double tol,
                 int& iterations, int cap) {
    for (;;) {
        // Bland: entering column = lowest index with positive reduced cost.
        std::size_t enter = total_cols;
        for (std::size_t j = 0; j < allowed_cols; ++j) {
            if (reduced[j] > tol) {
                enter = j;
                break;
            }
        }
        if (enter == total_cols) return true;  // optimal

        // Ratio test; ties by lowest basic-variable index (Bland).
        std::size_t leave = t.rows;
        double best_ratio = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < t.rows; ++i) {
            const double a = t.a[i][enter];
            if (a <= tol) continue;
            const double ratio = t.rhs[i] / a;
            if (ratio < best_ratio - tol ||
                (ratio < best_ratio + tol &&
                 (leave == t.rows || t.basis[i] < t.basis[leave]))) {
                best_ratio = ratio;
                leave = i;
            }
        }
        if (leave == t.rows) return false;  // unbounded

        pivot(t, reduced, obj_value, leave, enter, total_cols);
        if (++iterations > cap)
            throw SolverError("simplex exceeded iteration cap after " +
                              std::to_string(iterations) + " pivots");
    }
}

}  // namespace

LpSolution solve_lp(const LinearProgram& lp, double tol) {
    check_well_formed(lp);

    const std::size_t nv = lp.variable_count();
    const std::size_t me = lp.eq_lhs.size();
    const std::size_t mi = lp.ge_lhs.size();
    const std::size_t rows = me + mi;
    const std::size_t cols = nv + mi;          // structural + surplus
    const std::size_t total = cols + rows;      // + artificials
    const int cap = 50 * static_cast<int>(total + rows);

    Tableau t;
    t.rows = rows;
    t.cols = cols;
    t.a.assign(rows, std::vector<double>(total, 0.0));
    t.rhs.assign(rows, 0.0);
    t.basis.assign(rows, -1);

    for (std::size_t i = 0; i < me; ++i) {
        for (std::size_t j = 0; j < nv; ++j) t.a[i][j] = lp.eq_lhs[i][j];
        t.rhs[i] = lp.eq_rhs[i];
    }
    for (std::size_t i = 0; i < mi; ++i) {
        const std::size_t r = me + i;
        for (std::size_t j = 0; j < nv; ++j) t.a[r][j] = lp.ge_lhs[i][j];
        t.a[r][nv + i] = -1.0;  // surplus: G z - s = h
        t.rhs[r] = lp.ge_rhs[i];
    }
    // Flip rows so rhs >= 0, then add an identity of artificials.
    for (std::size_t i = 0; i < rows; ++i) {
        if (t.rhs[i] < 0.0) {
            for (std::size_t j = 0; j < cols; ++j) t.a[i][j] = -t.a[i][j];
            t.rhs[i] = -t.rhs[i];
        }
        t.a[i][cols + i] = 1.0;
        t.basis[i] = static_cast<int>(cols + i);
    }

    LpSolution sol;
    int iterations = 0;

    // Phase 1: maximize -sum(artificials). With the artificial basis the
    // reduced cost of column j is the column sum over all rows.
    {
        std::vector<double> reduced(total, 0.0);
        double obj = 0.0;
        for (std::size_t j = 0; j < cols; ++j)
            for (std::size_t i = 0; i < rows; ++i) reduced[j] += t.a[i][j];
        for (double b : t.rhs) obj -= b;

        if (!run_simplex(t, reduced, obj, total, total, tol, iterations, cap))
            throw SolverError("phase-1 simplex reported an unbounded direction");
        if (obj < -tol * std::max<std::size_t>(1, rows)) {
            sol.status = LpStatus::infeasible;
            sol.iterations = iterations;
            return sol;
        }
    }

    // Drive any artificial still basic (at zero) out of the basis.
    for (std::size_t i = 0; i < rows; ++i) {
        if (t.basis[i] < static_cast<int>(cols)) continue;
        std::size_t enter = cols;
        for (std::size_t j = 0; j < cols; ++j) {
            if (std::fabs(t.a[i][j]) > tol) {
                enter = j;
                break;
            }
        }
        if (enter == cols) continue;  // redundant row; harmless to keep
        std::vector<double> dummy(total, 0.0);
        double dummy_obj = 0.0;
        pivot(t, dummy, dummy_obj, i, enter, total);
    }

    // Phase 2 with the real objective (min converted to max).
    const double sense = lp.sense == LinearProgram::Sense::maximize ? 1.0 : -1.0;
    std::vector<double> reduced(total, 0.0);
    double obj = 0.0;
    {
        std::vector<double> cost(cols, 0.0);
        for (std::size_t j = 0; j < nv; ++j) cost[j] = sense * lp.objective[j];
        for (std::size_t j = 0; j < cols; ++j) {
            double r = cost[j];
            for (std::size_t i = 0; i < rows; ++i) {
                const int b = t.basis[i];
                if (b >= 0 && b < static_cast<int>(cols))
                    r -= cost[b] * t.a[i][j];
            }
            reduced[j] = r;
        }
        for (std::size_t i = 0; i < rows; ++i) {
            const int b = t.basis[i];
            if (b >= 0 && b < static_cast<int>(cols)) obj += cost[b] * t.rhs[i];
        }
    }

    if (!run_simplex(t, reduced, obj, total, cols, tol, iterations, cap)) {
        sol.status = LpStatus::unbounded;
        sol.iterations = iterations;
        return sol;
    }

    sol.values.assign(nv, 0.0);
    for (std::size_t i = 0; i < rows; ++i) {
        const int b = t.basis[i];
        if (b >= 0 && b < static_cast<int>(nv)) sol.values[b] = t.rhs[i];
    }
    sol.objective = 0.0;
    for (std::size_t j = 0; j < nv; ++j) sol.objective += lp.objective[j] * sol.values[j];
    sol.iterations = iterations;
    sol.status = LpStatus::optimal;

    // Feasibility recheck so an "optimal" answer is trustworthy.
    double scale = 1.0;
    for (double b : lp.eq_rhs) scale = std::max(scale, std::fabs(b));
    for (double b : lp.ge_rhs) scale = std::max(scale, std::fabs(b));
    const double bound = tol * scale * 1e3;
    for (std::size_t i = 0; i < me; ++i) {
        double lhs = 0.0;
        for (std::size_t j = 0; j < nv; ++j) lhs += lp.eq_lhs[i][j] * sol.values[j];
        if (std::fabs(lhs - lp.eq_rhs[i]) > bound)
            throw SolverError("optimal basis violates equality row " + std::to_string(i));
    }
    for (std::size_t i = 0; i < mi; ++i) {
        double lhs = 0.0;
        for (std::size_t j = 0; j < nv; ++j) lhs += lp.ge_lhs[i][j] * sol.values[j];
        if (lhs < lp.ge_rhs[i] - bound)
            throw SolverError("optimal basis violates inequality row " + std::to_string(i));
    }
    for (double v : sol.values)
        if (v < -bound) throw SolverError("optimal basis violates a variable bound");

    return sol;
}

}  // namespace kam
