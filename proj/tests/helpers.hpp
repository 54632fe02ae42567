#pragma once

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "fairrank/merit_models.hpp"
#include "fairrank/policies.hpp"
#include "fairrank/rng.hpp"
#include "fairrank/topk.hpp"

namespace fairrank::testing {

// Random finite-support merit distribution: `atoms` merit vectors over n
// agents, merits on a small integer grid so ties occur, probabilities from
// normalized uniforms.
inline EmpiricalMeritDistribution random_empirical(int n, int atoms, std::uint64_t seed) {
    auto gen = make_engine(seed);
    std::uniform_int_distribution<int> merit(0, 4);
    std::uniform_real_distribution<double> mass(0.05, 1.0);
    EmpiricalMeritDistribution dist;
    double total = 0.0;
    for (int a = 0; a < atoms; ++a) {
        EmpiricalMeritDistribution::Atom atom;
        atom.merits.resize(n);
        for (double& v : atom.merits) v = merit(gen);
        atom.probability = mass(gen);
        total += atom.probability;
        dist.support.push_back(std::move(atom));
    }
    for (auto& atom : dist.support) atom.probability /= total;
    // Nudge the largest atom so the sum is exactly 1 after rounding.
    double sum = 0.0;
    for (const auto& atom : dist.support) sum += atom.probability;
    dist.support.back().probability += 1.0 - sum;
    return dist;
}

// Random doubly stochastic matrix as a convex combination of `perms` random
// permutation matrices.
inline MarginalRankMatrix random_doubly_stochastic(int n, int perms, std::uint64_t seed) {
    auto gen = make_engine(seed);
    std::uniform_real_distribution<double> mass(0.05, 1.0);
    std::vector<double> weights(perms);
    double total = 0.0;
    for (double& w : weights) {
        w = mass(gen);
        total += w;
    }
    MarginalRankMatrix m{n, std::vector<double>(static_cast<std::size_t>(n) * n, 0.0)};
    std::vector<int> perm(n);
    for (int p = 0; p < perms; ++p) {
        for (int i = 0; i < n; ++i) perm[i] = i;
        std::shuffle(perm.begin(), perm.end(), gen);
        for (int k = 1; k <= n; ++k) m.at(perm[k - 1], k) += weights[p] / total;
    }
    return m;
}

inline double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
    double worst = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::abs(a[i] - b[i]));
    return worst;
}

}  // namespace fairrank::testing
