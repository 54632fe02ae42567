#pragma once

#include <iosfwd>
#include <utility>
#include <vector>

#include "fairrank/policies.hpp"
#include "fairrank/topk.hpp"

namespace fairrank {

// Result of auditing a marginal rank matrix against top-k probabilities.
// phi_star is the largest phi for which every cumulative fairness constraint
// holds; slack[x][k] = cumsum_k(P[x]) - phi_star * q[x][k].
struct FairnessReport {
    int n = 0;
    double phi_star = 0.0;
    std::vector<std::pair<int, int>> binding;  // (agent, k) pairs, 1-based k
    std::vector<double> slack;                 // row-major n x n

    double slack_at(int agent, int k) const {
        return slack[static_cast<std::size_t>(agent) * n + k - 1];
    }
};

FairnessReport fairness_level(const MarginalRankMatrix& m, const TopKMatrix& q);

bool is_phi_fair(const MarginalRankMatrix& m, const TopKMatrix& q, double phi,
                 double tol = 1e-9);

// Mean-absolute-difference Gini: sum_ij |e_i - e_j| / (2 n^2 mean(e)).
double gini(const std::vector<double>& exposure);

// How many of the rankings place each agent within positions 1..top_t.
std::vector<long> exposure_counts(const std::vector<Ranking>& rankings, int top_t);

void write_report_json(const FairnessReport& report, std::ostream& out);

}  // namespace fairrank
