#pragma once

#include <string>
#include <vector>

#include "fairrank/merit_models.hpp"
#include "fairrank/policies.hpp"

namespace fairrank {

// Nonincreasing nonnegative position weights.
struct PositionWeights {
    std::vector<double> w;

    int size() const { return static_cast<int>(w.size()); }
    void validate() const;
};

PositionWeights dcg_weights(int n);         // 1 / log2(1 + k)
PositionWeights reciprocal_weights(int n);  // 1 / k
PositionWeights precision_at_weights(int cutoff, int n);
PositionWeights explicit_weights(std::vector<double> w);  // validated

// Parses "dcg", "reciprocal", or "precision:K".
PositionWeights weights_from_spec(const std::string& spec, int n);

// sum_k w[k] * merits[ranking[k]]
double ranking_utility(const Ranking& ranking, const MeritVector& merits,
                       const PositionWeights& w);

// sum_x sum_k P[x][k] * merits[x] * w[k]
double policy_utility(const MarginalRankMatrix& marginals, const MeritVector& merits,
                      const PositionWeights& w);

double ndcg(double utility, double ideal_utility);

}  // namespace fairrank
