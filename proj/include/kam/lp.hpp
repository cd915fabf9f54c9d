#pragma once

// Dense linear-program solver for the small programs produced by the KAM
// formulations. Two-phase primal simplex with Bland's anti-cycling rule;
// ties broken by lowest index so repeated solves are bitwise identical.

#include <cstddef>
#include <vector>

namespace kam {

enum class LpStatus { optimal, infeasible, unbounded };

// max/min c.z  subject to  A z = b,  G z >= h,  z >= 0.
struct LinearProgram {
    enum class Sense { maximize, minimize };

    Sense sense = Sense::maximize;
    std::vector<double> objective;
    std::vector<std::vector<double>> eq_lhs;
    std::vector<double> eq_rhs;
    std::vector<std::vector<double>> ge_lhs;
    std::vector<double> ge_rhs;

    std::size_t variable_count() const { return objective.size(); }
};

struct LpSolution {
    LpStatus status = LpStatus::infeasible;
    std::vector<double> values;  // primal values, empty unless optimal
    double objective = 0.0;
    int iterations = 0;
};

// Solves `lp` to optimality. Throws std::invalid_argument on malformed
// input (inconsistent dimensions, non-finite data) and kam::SolverError if
// the pivot count exceeds 50 * (variables + constraints) or an "optimal"
// basis fails the feasibility recheck at tolerance `tol`.
LpSolution solve_lp(const LinearProgram& lp, double tol = 1e-9);

}  // namespace kam
