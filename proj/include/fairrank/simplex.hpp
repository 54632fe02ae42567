#pragma once

#include <vector>

namespace fairrank {

// Maximize c.x subject to a_ub x <= b_ub, a_eq x = b_eq, x >= 0.
struct LinearProgram {
    std::vector<std::vector<double>> a_ub;
    std::vector<double> b_ub;
    std::vector<std::vector<double>> a_eq;
    std::vector<double> b_eq;
    std::vector<double> c;
};

enum class LpStatus { optimal, infeasible, iteration_limit };

struct LpSolution {
    LpStatus status = LpStatus::infeasible;
    double objective = 0.0;
    std::vector<double> x;
};

// Two-phase dense-tableau simplex with Bland's rule.
LpSolution simplex_solve(const LinearProgram& lp, long max_iterations = 200000,
                         double tol = 1e-9);

}  // namespace fairrank
