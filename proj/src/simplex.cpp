#include "fairrank/simplex.hpp"

#include <cmath>
#include <cstddef>
#include <stdexcept>

namespace fairrank {

namespace {

struct Tableau {
    int rows = 0;
    int cols = 0;  // columns excluding rhs
    std::vector<double> a;  // rows x (cols + 1), last column is rhs
    std::vector<int> basis;

    double& at(int r, int c) { return a[static_cast<std::size_t>(r) * (cols + 1) + c]; }
    double rhs(int r) const { return a[static_cast<std::size_t>(r) * (cols + 1) + cols]; }

    void pivot(int r, int c) {
        const double piv = at(r, c);
        for (int j = 0; j <= cols; ++j) at(r, j) /= piv;
        for (int i = 0; i < rows; ++i) {
            if (i == r) continue;
            const double f = at(i, c);
            if (f == 0.0) continue;
            for (int j = 0; j <= cols; ++j) at(i, j) -= f * at(r, j);
        }
        basis[r] = c;
    }
};

// Bland's rule iteration on a maximization objective row z (length cols + 1,
// z[cols] holds the objective value). Returns false on iteration limit.
bool optimize(Tableau& t, std::vector<double>& z, const std::vector<bool>& banned,
              long max_iterations, double tol) {
    for (long iter = 0; iter < max_iterations; ++iter) {
        int entering = -1;
        for (int j = 0; j < t.cols; ++j) {
            if (!banned[j] && z[j] > tol) { entering = j; break; }
        }
        if (entering < 0) return true;
        int leaving = -1;
        double best_ratio = 0.0;
        for (int i = 0; i < t.rows; ++i) {
            if (t.at(i, entering) <= tol) continue;
            double ratio = t.rhs(i) / t.at(i, entering);
            if (leaving < 0 || ratio < best_ratio - tol ||
                (ratio < best_ratio + tol && t.basis[i] < t.basis[leaving])) {
                leaving = i;
                best_ratio = ratio;
            }
        }
        if (leaving < 0) throw std::runtime_error("simplex: objective unbounded");
        const double zc = z[entering];
        t.pivot(leaving, entering);
        for (int j = 0; j <= t.cols; ++j) z[j] -= zc * t.at(leaving, j);
        z[entering] = 0.0;
    }
    return false;
}

}  // namespace

LpSolution simplex_solve(const LinearProgram& lp, long max_iterations, double tol) {
    const int nv = static_cast<int>(lp.c.size());
    const int m_ub = static_cast<int>(lp.a_ub.size());
    const int m_eq = static_cast<int>(lp.a_eq.size());
    const int rows = m_ub + m_eq;

    Tableau t;
    t.rows = rows;
    t.cols = nv + m_ub + rows;  // structural + slack + artificial
    t.a.assign(static_cast<std::size_t>(rows) * (t.cols + 1), 0.0);
    t.basis.assign(rows, -1);

    std::vector<bool> is_artificial(t.cols, false);
    for (int j = nv + m_ub; j < t.cols; ++j) is_artificial[j] = true;

    for (int i = 0; i < rows; ++i) {
        const bool ub_row = i < m_ub;
        const auto& coeffs = ub_row ? lp.a_ub[i] : lp.a_eq[i - m_ub];
        double b = ub_row ? lp.b_ub[i] : lp.b_eq[i - m_ub];
        if (static_cast<int>(coeffs.size()) != nv)
            throw std::invalid_argument("simplex: constraint width mismatch");
        const double sign = b < 0.0 ? -1.0 : 1.0;
        for (int j = 0; j < nv; ++j) t.at(i, j) = sign * coeffs[j];
        if (ub_row) t.at(i, nv + i) = sign;
        t.at(i, t.cols) = sign * b;
        if (ub_row && sign > 0.0) {
            t.basis[i] = nv + i;  // slack starts basic
        } else {
            t.basis[i] = nv + m_ub + i;
            t.at(i, nv + m_ub + i) = 1.0;
        }
    }

    // Phase 1: maximize -(sum of artificials).
    std::vector<double> z(t.cols + 1, 0.0);
    for (int i = 0; i < rows; ++i) {
        if (!is_artificial[t.basis[i]]) continue;
        for (int j = 0; j <= t.cols; ++j) z[j] += t.a[static_cast<std::size_t>(i) * (t.cols + 1) + j];
    }
    for (int j = 0; j < t.cols; ++j)
        if (is_artificial[j]) z[j] = 0.0;
    std::vector<bool> none(t.cols, false);
    if (!optimize(t, z, none, max_iterations, tol))
        return {LpStatus::iteration_limit, 0.0, {}};
    if (z[t.cols] > tol) return {LpStatus::infeasible, 0.0, {}};

    // Pivot any artificial still basic (at value 0) out if possible.
    for (int i = 0; i < rows; ++i) {
        if (!is_artificial[t.basis[i]]) continue;
        for (int j = 0; j < nv + m_ub; ++j) {
            if (std::abs(t.at(i, j)) > tol) {
                t.pivot(i, j);
                break;
            }
        }
    }

    // Phase 2: the real objective, artificial columns banned.
    std::vector<double> z2(t.cols + 1, 0.0);
    for (int j = 0; j < nv; ++j) z2[j] = lp.c[j];
    for (int i = 0; i < rows; ++i) {
        const int b = t.basis[i];
        const double cb = b < nv ? lp.c[b] : 0.0;
        if (cb == 0.0) continue;
        for (int j = 0; j <= t.cols; ++j)
            z2[j] -= cb * t.a[static_cast<std::size_t>(i) * (t.cols + 1) + j];
    }
    if (!optimize(t, z2, is_artificial, max_iterations, tol))
        return {LpStatus::iteration_limit, 0.0, {}};

    LpSolution sol;
    sol.status = LpStatus::optimal;
    sol.x.assign(nv, 0.0);
    for (int i = 0; i < rows; ++i)
        if (t.basis[i] < nv) sol.x[t.basis[i]] = t.rhs(i);
    sol.objective = 0.0;
    for (int j = 0; j < nv; ++j) sol.objective += lp.c[j] * sol.x[j];
    return sol;
}

}  // namespace fairrank
