#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "fairrank/merit_models.hpp"

namespace fairrank {

// q[x][k] = P(agent x is among the top k by merit), k = 1..n.
// Rows are nondecreasing in k, the last column is all ones, and every column
// k sums to k.
struct TopKMatrix {
    int n = 0;
    std::vector<double> q;  // row-major, q[x * n + (k - 1)]

    double at(int agent, int k) const { return q[static_cast<std::size_t>(agent) * n + k - 1]; }
    double& at(int agent, int k) { return q[static_cast<std::size_t>(agent) * n + k - 1]; }

    void validate(double tol = 1e-9) const;
};

// Exact top-k probabilities by enumerating the support. Ties within an atom
// contribute min(max(k - a, 0), t + 1) / (t + 1), where a counts strictly
// higher merits and t counts other agents tied with x.
TopKMatrix exact_topk(const EmpiricalMeritDistribution& dist);

// Empirical top-k frequencies over m i.i.d. draws, ties broken uniformly per
// draw. Column sums equal k exactly. Sample i uses derive_seed(seed, i), so
// the result is independent of how draws are partitioned across workers.
TopKMatrix monte_carlo_topk(const MeritModel& model, long samples, std::uint64_t seed);

// m = ceil((kappa + 1) * ln(2n) / (2 eps^2)); natural logarithm.
long dkw_sample_size(int n, double kappa, double eps);

// q'[x][k] = k (q[x][k] + eps) / (k + n eps). Column sums stay exactly k.
// A final max-prefix pass per row restores monotonicity if the formula
// violated it (possible only for pathological inputs).
TopKMatrix robustify(const TopKMatrix& q, double eps);

// CSV with header "k=1,...,k=n", one row per agent.
void write_topk_csv(const TopKMatrix& q, std::ostream& out);
TopKMatrix read_topk_csv(std::istream& in);

}  // namespace fairrank
