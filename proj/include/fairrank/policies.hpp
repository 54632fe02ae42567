#pragma once

#include <cstdint>
#include <iosfwd>
#include <utility>
#include <vector>

#include "fairrank/merit_models.hpp"
#include "fairrank/topk.hpp"

namespace fairrank {

// ranking[k] is the agent in position k (0-based positions internally).
using Ranking = std::vector<int>;

bool is_permutation_of_n(const Ranking& ranking, int n);

// Sparse lottery over rankings; probabilities positive and summing to 1.
struct RankingDistribution {
    int n = 0;
    std::vector<std::pair<Ranking, double>> entries;

    void validate(double tol = 1e-9) const;
};

// Doubly stochastic matrix of P(agent x placed at position k).
struct MarginalRankMatrix {
    int n = 0;
    std::vector<double> p;  // row-major, p[x * n + (k - 1)]

    double at(int agent, int k) const { return p[static_cast<std::size_t>(agent) * n + k - 1]; }
    double& at(int agent, int k) { return p[static_cast<std::size_t>(agent) * n + k - 1]; }

    void validate(double tol = 1e-9) const;
};

MarginalRankMatrix identity_marginals(int n);
MarginalRankMatrix permutation_marginals(const Ranking& ranking);

// Deterministic sort by nonincreasing expected merit, ties by agent index.
Ranking opt_ranking(const MeritVector& expected);

// Thompson sampling: argsort of one merit draw, uniform per-draw tie-break.
Ranking ts_sample(const MeritModel& model, std::uint64_t seed);

// With probability phi a TS draw, otherwise the OPT ranking.
Ranking mixing_sample(const MeritModel& model, double phi, std::uint64_t seed);

// First differences of q along k; doubly stochastic by the q invariants.
MarginalRankMatrix ts_marginals(const TopKMatrix& q);

// Probability-weighted sum of permutation matrices.
MarginalRankMatrix marginals_of_distribution(const RankingDistribution& dist);

// CSV with header "k=1,...,k=n".
void write_marginals_csv(const MarginalRankMatrix& m, std::ostream& out);
MarginalRankMatrix read_marginals_csv(std::istream& in);

// JSON: {"n": int, "entries": [{"perm": [...], "prob": float}]}
void write_lottery_json(const RankingDistribution& dist, std::ostream& out);
RankingDistribution read_lottery_json(std::istream& in);

}  // namespace fairrank
