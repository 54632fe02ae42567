#include "fairrank/lp_fair.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "fairrank/simplex.hpp"

namespace fairrank {

FairLpInstance build_lp(const TopKMatrix& q, const MeritVector& expected,
                        const PositionWeights& w, double phi) {
    if (!(phi >= 0.0 && phi <= 1.0)) throw std::invalid_argument("build_lp: phi outside [0,1]");
    q.validate(1e-7);
    w.validate();
    const int n = q.n;
    if (static_cast<int>(expected.size()) != n || w.size() != n)
        throw std::invalid_argument("build_lp: dimension mismatch");
    FairLpInstance inst;
    inst.n = n;
    inst.phi = phi;
    inst.objective.resize(static_cast<std::size_t>(n) * n);
    inst.fairness_rhs.resize(static_cast<std::size_t>(n) * n);
    for (int x = 0; x < n; ++x)
        for (int k = 1; k <= n; ++k) {
            inst.objective[static_cast<std::size_t>(x) * n + k - 1] = expected[x] * w.w[k - 1];
            inst.fairness_rhs[static_cast<std::size_t>(x) * n + k - 1] = phi * q.at(x, k);
        }
    return inst;
}

namespace {

// Per-agent gain order. c[x][k] = d_x * w_k with w nonincreasing, so column
// k=1 carries d_x scaled by the largest weight; the greedy order only needs
// d_x up to a positive common factor.
std::vector<double> agent_gains(const FairLpInstance& inst) {
    std::vector<double> d(inst.n);
    for (int x = 0; x < inst.n; ++x) d[x] = inst.objective[static_cast<std::size_t>(x) * inst.n];
    return d;
}

// Exact solution in cumulative space. For each k the subproblem
//   max sum_x d_x z_x  s.t.  sum_x z_x = k,  phi q[x][k] <= z_x <= 1
// is a fractional knapsack solved greedily in one fixed agent order; the
// per-k optima are nondecreasing in k because both the slack k(1 - phi) and
// the lower bounds grow with k, so their first differences form a feasible
// (hence optimal) marginal matrix.
bool solve_waterfill(const FairLpInstance& inst, MarginalRankMatrix& out) {
    const int n = inst.n;
    const std::vector<double> d = agent_gains(inst);
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return d[a] > d[b]; });

    std::vector<double> z_prev(n, 0.0), z(n);
    out = MarginalRankMatrix{n, std::vector<double>(static_cast<std::size_t>(n) * n)};
    for (int k = 1; k <= n; ++k) {
        double lower_total = 0.0;
        for (int x = 0; x < n; ++x) {
            z[x] = inst.fairness_rhs[static_cast<std::size_t>(x) * n + k - 1];
            lower_total += z[x];
        }
        double slack = k - lower_total;
        if (slack < -1e-9) return false;  // inconsistent rhs, let simplex report
        for (int idx = 0; idx < n && slack > 0.0; ++idx) {
            const int x = order[idx];
            const double give = std::min(1.0 - z[x], slack);
            z[x] += give;
            slack -= give;
        }
        if (slack > 1e-9) return false;
        for (int x = 0; x < n; ++x) {
            const double p = z[x] - z_prev[x];
            if (p < -1e-9) return false;
            out.at(x, k) = std::max(0.0, p);
        }
        z_prev = z;
    }
    return true;
}

MarginalRankMatrix solve_with_simplex(const FairLpInstance& inst, const SolveOptions& opts) {
    const int n = inst.n;
    LinearProgram lp;
    lp.c = inst.objective;
    // Fairness: -sum_{k'<=k} P[x][k'] <= -phi q[x][k].
    lp.a_ub.reserve(static_cast<std::size_t>(n) * n);
    for (int x = 0; x < n; ++x)
        for (int k = 1; k <= n; ++k) {
            std::vector<double> row(static_cast<std::size_t>(n) * n, 0.0);
            for (int kk = 1; kk <= k; ++kk) row[static_cast<std::size_t>(x) * n + kk - 1] = -1.0;
            lp.a_ub.push_back(std::move(row));
            lp.b_ub.push_back(-inst.fairness_rhs[static_cast<std::size_t>(x) * n + k - 1]);
        }
    for (int x = 0; x < n; ++x) {
        std::vector<double> row(static_cast<std::size_t>(n) * n, 0.0);
        for (int k = 1; k <= n; ++k) row[static_cast<std::size_t>(x) * n + k - 1] = 1.0;
        lp.a_eq.push_back(std::move(row));
        lp.b_eq.push_back(1.0);
    }
    for (int k = 1; k <= n; ++k) {
        std::vector<double> row(static_cast<std::size_t>(n) * n, 0.0);
        for (int x = 0; x < n; ++x) row[static_cast<std::size_t>(x) * n + k - 1] = 1.0;
        lp.a_eq.push_back(std::move(row));
        lp.b_eq.push_back(1.0);
    }
    LpSolution sol = simplex_solve(lp, opts.max_iterations, opts.tolerance);
    if (sol.status == LpStatus::infeasible)
        throw std::runtime_error("solve_lp: instance reported infeasible");
    if (sol.status == LpStatus::iteration_limit)
        throw std::runtime_error("solve_lp: simplex iteration limit reached");
    MarginalRankMatrix m{n, std::move(sol.x)};
    return m;
}

bool postconditions_hold(const FairLpInstance& inst, const MarginalRankMatrix& m) {
    try {
        m.validate(1e-7);
    } catch (const std::exception&) {
        return false;
    }
    const int n = inst.n;
    for (int x = 0; x < n; ++x) {
        double cum = 0.0;
        for (int k = 1; k <= n; ++k) {
            cum += m.at(x, k);
            if (cum < inst.fairness_rhs[static_cast<std::size_t>(x) * n + k - 1] - 1e-9)
                return false;
        }
    }
    return true;
}

}  // namespace

MarginalRankMatrix solve_lp(const FairLpInstance& inst, const SolveOptions& opts) {
    if (inst.n <= 0) throw std::invalid_argument("solve_lp: empty instance");
    if (!opts.force_simplex) {
        MarginalRankMatrix m;
        if (solve_waterfill(inst, m) && postconditions_hold(inst, m)) return m;
    }
    MarginalRankMatrix m = solve_with_simplex(inst, opts);
    if (!postconditions_hold(inst, m))
        throw std::runtime_error("solve_lp: solution violates postconditions");
    return m;
}

namespace {

// Kuhn's augmenting-path matching on the support graph. match_col[k] is the
// agent assigned to position k, or -1.
bool try_augment(int x, const std::vector<std::vector<int>>& adj, std::vector<int>& match_col,
                 std::vector<bool>& visited) {
    for (int k : adj[x]) {
        if (visited[k]) continue;
        visited[k] = true;
        if (match_col[k] < 0 || try_augment(match_col[k], adj, match_col, visited)) {
            match_col[k] = x;
            return true;
        }
    }
    return false;
}

}  // namespace

RankingDistribution bvn_decompose(const MarginalRankMatrix& m, double zero_tol) {
    m.validate(1e-7);
    const int n = m.n;
    std::vector<double> residual = m.p;
    auto entry = [&](int x, int k) -> double& {
        return residual[static_cast<std::size_t>(x) * n + k - 1];
    };

    RankingDistribution dist;
    dist.n = n;
    const int max_perms = n * n - 2 * n + 2;
    double remaining = 1.0;
    while (remaining > zero_tol * n) {
        std::vector<std::vector<int>> adj(n);
        for (int x = 0; x < n; ++x)
            for (int k = 1; k <= n; ++k)
                if (entry(x, k) > zero_tol) adj[x].push_back(k);
        std::vector<int> match_col(n + 1, -1);
        int matched = 0;
        for (int x = 0; x < n; ++x) {
            std::vector<bool> visited(n + 1, false);
            if (try_augment(x, adj, match_col, visited)) ++matched;
        }
        if (matched < n)
            throw std::runtime_error(
                "bvn_decompose: no perfect matching; matrix not doubly stochastic within tolerance");

        Ranking perm(n);
        double theta = remaining;
        for (int k = 1; k <= n; ++k) {
            perm[k - 1] = match_col[k];
            theta = std::min(theta, entry(match_col[k], k));
        }
        for (int k = 1; k <= n; ++k) {
            double& e = entry(match_col[k], k);
            e = std::max(0.0, e - theta);
        }
        dist.entries.emplace_back(std::move(perm), theta);
        remaining -= theta;
        if (static_cast<int>(dist.entries.size()) > max_perms)
            throw std::runtime_error("bvn_decompose: exceeded permutation bound");
    }
    // Fold the dropped sub-tolerance residue back in proportionally.
    double total = 0.0;
    for (const auto& e : dist.entries) total += e.second;
    for (auto& e : dist.entries) e.second /= total;
    dist.validate();
    return dist;
}

RankingDistribution lp_policy(const TopKMatrix& q, const MeritVector& expected,
                              const PositionWeights& w, double phi, const SolveOptions& opts) {
    FairLpInstance inst = build_lp(q, expected, w, phi);
    if (phi >= 1.0) {
        // At phi = 1 the cumulative constraints all bind, so the marginals
        // are the first differences of q; no solve needed.
        return bvn_decompose(ts_marginals(q));
    }
    return bvn_decompose(solve_lp(inst, opts));
}

}  // namespace fairrank
