#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "fairrank/policies.hpp"
#include "fairrank/utility.hpp"
#include "helpers.hpp"

using namespace fairrank;

TEST_CASE("weight families") {
    PositionWeights dcg = dcg_weights(4);
    CHECK(dcg.w[0] == doctest::Approx(1.0));
    CHECK(dcg.w[1] == doctest::Approx(1.0 / std::log2(3.0)));
    CHECK(dcg.w[3] == doctest::Approx(1.0 / std::log2(5.0)));

    PositionWeights rec = reciprocal_weights(3);
    CHECK(rec.w[2] == doctest::Approx(1.0 / 3.0));

    PositionWeights prec = precision_at_weights(2, 4);
    CHECK(prec.w == std::vector<double>{0.5, 0.5, 0.0, 0.0});
    CHECK_THROWS_AS(precision_at_weights(5, 4), std::invalid_argument);
    CHECK_THROWS_AS(precision_at_weights(0, 4), std::invalid_argument);
}

TEST_CASE("weights_from_spec parsing") {
    CHECK(weights_from_spec("dcg", 3).w == dcg_weights(3).w);
    CHECK(weights_from_spec("reciprocal", 3).w == reciprocal_weights(3).w);
    CHECK(weights_from_spec("precision:2", 3).w == precision_at_weights(2, 3).w);
    CHECK_THROWS_AS(weights_from_spec("ndcg", 3), std::invalid_argument);
    CHECK_THROWS_AS(weights_from_spec("precision:x", 3), std::invalid_argument);
}

TEST_CASE("weight validation") {
    CHECK_THROWS_AS(explicit_weights({1.0, 2.0}), std::invalid_argument);   // increasing
    CHECK_THROWS_AS(explicit_weights({1.0, -0.5}), std::invalid_argument);  // negative
    CHECK_THROWS_AS(explicit_weights({}), std::invalid_argument);
    CHECK_NOTHROW(explicit_weights({1.0, 1.0, 0.0}));
}

TEST_CASE("ranking utility and policy utility agree on a point mass") {
    MeritVector merits = {1.0, 0.5, 0.25};
    PositionWeights w = explicit_weights({1.0, 0.5, 0.0});
    Ranking r = {2, 0, 1};
    double direct = ranking_utility(r, merits, w);
    CHECK(direct == doctest::Approx(0.25 + 0.5 * 1.0));
    CHECK(policy_utility(permutation_marginals(r), merits, w) == doctest::Approx(direct));
}

TEST_CASE("policy utility is the lottery average") {
    MeritVector merits = {1.0, 0.5, 0.5};
    PositionWeights w = explicit_weights({1.0, 1.0, 0.0});
    RankingDistribution dist;
    dist.n = 3;
    dist.entries = {{{0, 1, 2}, 0.25}, {{1, 0, 2}, 0.25}, {{0, 2, 1}, 0.25}, {{2, 0, 1}, 0.25}};
    double expected = 0.0;
    for (const auto& [perm, prob] : dist.entries)
        expected += prob * ranking_utility(perm, merits, w);
    CHECK(policy_utility(marginals_of_distribution(dist), merits, w) ==
          doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("example2 reference utilities") {
    MeritVector merits = expected_merits(MeritModel{example2_distribution()});
    PositionWeights w = explicit_weights({1.0, 1.0, 0.0});
    CHECK(ranking_utility(opt_ranking(merits), merits, w) == doctest::Approx(1.5).epsilon(1e-12));
    TopKMatrix q = exact_topk(example2_distribution());
    CHECK(policy_utility(ts_marginals(q), merits, w) ==
          doctest::Approx(35.0 / 24.0).epsilon(1e-12));
}

TEST_CASE("ndcg") {
    CHECK(ndcg(1.2, 1.5) == doctest::Approx(0.8));
    CHECK(ndcg(1.5, 1.5) == doctest::Approx(1.0));
    CHECK_THROWS_AS(ndcg(1.0, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(ndcg(1.0, -1.0), std::invalid_argument);
}

TEST_CASE("utility dimension mismatches are rejected") {
    MeritVector merits = {1.0, 0.5};
    PositionWeights w = explicit_weights({1.0, 0.5, 0.0});
    CHECK_THROWS_AS(ranking_utility({0, 1}, merits, w), std::invalid_argument);
    CHECK_THROWS_AS(policy_utility(identity_marginals(3), merits, w), std::invalid_argument);
}
