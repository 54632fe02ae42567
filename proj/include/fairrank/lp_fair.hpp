#pragma once

#include <vector>

#include "fairrank/policies.hpp"
#include "fairrank/topk.hpp"
#include "fairrank/utility.hpp"

namespace fairrank {

// The phi-fair utility-maximizing LP over marginal rank probabilities:
// maximize sum_{x,k} P[x][k] c[x][k] subject to cumulative fairness
// sum_{k'<=k} P[x][k'] >= phi q[x][k], row/column sums 1, box [0,1].
struct FairLpInstance {
    int n = 0;
    std::vector<double> objective;      // c[x][k] = E[v_x] * w[k], row-major
    std::vector<double> fairness_rhs;   // phi * q[x][k], row-major
    double phi = 0.0;
};

struct SolveOptions {
    long max_iterations = 200000;
    double tolerance = 1e-9;
    // The structured solver is exact here; the generic simplex exists as an
    // independent route and can be forced for cross-checks.
    bool force_simplex = false;
};

FairLpInstance build_lp(const TopKMatrix& q, const MeritVector& expected,
                        const PositionWeights& w, double phi);

// Optimal doubly stochastic matrix. The default method optimizes each
// cumulative column independently (a fractional knapsack per position); the
// per-column optima are mutually consistent, so the result is exact.
// Postconditions are verified and a simplex fallback covers any instance the
// structured method rejects.
MarginalRankMatrix solve_lp(const FairLpInstance& instance, const SolveOptions& opts = {});

// Birkhoff-von-Neumann: repeatedly extract a perfect matching on the support
// graph (entries > zero_tol) and subtract the minimum matched entry. At most
// n^2 - 2n + 2 permutations. Throws if no perfect matching exists, which
// signals the input is not doubly stochastic beyond tolerance.
RankingDistribution bvn_decompose(const MarginalRankMatrix& m, double zero_tol = 1e-9);

// build_lp + solve_lp + bvn_decompose. phi = 1 short-circuits to the unique
// feasible point ts_marginals(q).
RankingDistribution lp_policy(const TopKMatrix& q, const MeritVector& expected,
                              const PositionWeights& w, double phi,
                              const SolveOptions& opts = {});

}  // namespace fairrank
