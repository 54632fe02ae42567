#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <variant>
#include <vector>

namespace fairrank {

// Merit vector: one real-valued merit per agent.
using MeritVector = std::vector<double>;

// Finite-support joint distribution over merit vectors. Atom probabilities
// must be positive and sum to 1 within 1e-12; all vectors share one length.
// Ties inside an atom are allowed and resolved downstream by uniform random
// tie-breaking.
struct EmpiricalMeritDistribution {
    struct Atom {
        MeritVector merits;
        double probability = 0.0;
    };

    std::vector<Atom> support;

    int agent_count() const;
    void validate() const;
};

// Per-agent Dirichlet posterior over multinomial rating parameters on levels
// 1..R. An agent's merit is the mean rating under a sampled parameter vector.
struct DirichletMultinomialModel {
    std::vector<std::vector<double>> alpha;  // alpha[agent][rating-1], all > 0
    int rating_levels = 0;

    int agent_count() const { return static_cast<int>(alpha.size()); }
    void validate() const;
};

// Independent per-agent Gaussian relevance. stddev 0 degenerates to the mean.
struct GaussianRelevanceModel {
    std::vector<double> mean;
    std::vector<double> stddev;

    int agent_count() const { return static_cast<int>(mean.size()); }
    void validate() const;
};

using MeritModel =
    std::variant<EmpiricalMeritDistribution, DirichletMultinomialModel, GaussianRelevanceModel>;

int agent_count(const MeritModel& model);
void validate(const MeritModel& model);

// One i.i.d. merit draw; deterministic given (model, seed).
MeritVector sample_merits(const MeritModel& model, std::uint64_t seed);

// Draw using a caller-owned engine; used where follow-up randomness (e.g.
// tie-break keys) must come from the same per-sample stream. Skips
// validation; callers validate the model once up front.
MeritVector sample_merits_with_engine(const MeritModel& model, std::mt19937_64& gen);

// Exact expected merit per agent (closed form for Dirichlet and Gaussian,
// probability-weighted sum for empirical supports).
MeritVector expected_merits(const MeritModel& model);

// Conjugate update: alpha'[agent][r] = prior[r] + counts[agent][r].
// Throws if any counts row length differs from the prior length.
DirichletMultinomialModel dirichlet_posterior_from_counts(
    const std::vector<double>& prior, const std::vector<std::vector<long>>& counts);

// Expected mean rating sum_r r * alpha'_r / sum alpha' for one agent.
double dirichlet_expected_merit(const DirichletMultinomialModel& model, int agent);

// sigma_i = (1 + epsilon - max_u scores[u][i]) / gamma, clamped at 0.
std::vector<double> gaussian_sigma_calibration(
    const std::vector<std::vector<double>>& scores, double gamma, double epsilon);

// The three-agent instance with merits (1, Bernoulli(1/2), Bernoulli(1/2)),
// used as a built-in fixture throughout tests and the CLI.
EmpiricalMeritDistribution example2_distribution();

}  // namespace fairrank
