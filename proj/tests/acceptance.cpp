// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure. Self-contained; uses only the built-in fixture, generated random
// instances, and the synthetic ratings corpus (plus ML-100K when present).
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "fairrank/audit.hpp"
#include "fairrank/experiments.hpp"
#include "fairrank/lp_fair.hpp"
#include "fairrank/rng.hpp"
#include "../tests/helpers.hpp"

using namespace fairrank;
using fairrank::testing::random_empirical;
using fairrank::testing::random_doubly_stochastic;
using fairrank::testing::max_abs_diff;

namespace {

struct Check {
    bool ok = true;
    std::string detail;

    void expect(bool cond, const std::string& why) {
        if (!cond) {
            ok = false;
            if (!detail.empty()) detail += "; ";
            detail += why;
        }
    }
    void note(const std::string& text) {
        if (!detail.empty()) detail += "; ";
        detail += text;
    }
};

std::string fmt(double v) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

// --- criterion bodies ---

void exact_topk_example2(Check& c) {
    TopKMatrix q = exact_topk(example2_distribution());
    const double expected[3][3] = {
        {14.0 / 24, 22.0 / 24, 1.0}, {5.0 / 24, 13.0 / 24, 1.0}, {5.0 / 24, 13.0 / 24, 1.0}};
    double worst = 0.0;
    for (int x = 0; x < 3; ++x)
        for (int k = 1; k <= 3; ++k)
            worst = std::max(worst, std::abs(q.at(x, k) - expected[x][k - 1]));
    c.expect(worst <= 1e-12, "max error " + fmt(worst));
}

void opt_audit_example2(Check& c) {
    TopKMatrix q = exact_topk(example2_distribution());
    RankingDistribution opt_mix;
    opt_mix.n = 3;
    opt_mix.entries = {
        {{0, 1, 2}, 0.25}, {{1, 0, 2}, 0.25}, {{0, 2, 1}, 0.25}, {{2, 0, 1}, 0.25}};
    double phi_star = fairness_level(marginals_of_distribution(opt_mix), q).phi_star;
    c.expect(std::abs(phi_star - 6.0 / 7.0) <= 1e-12, "phi_star " + fmt(phi_star));
}

void lp_endpoints_example2(Check& c) {
    TopKMatrix q = exact_topk(example2_distribution());
    MeritVector merits = expected_merits(MeritModel{example2_distribution()});
    PositionWeights w = explicit_weights({1.0, 1.0, 0.0});
    double u0 = policy_utility(solve_lp(build_lp(q, merits, w, 0.0)), merits, w);
    c.expect(std::abs(u0 - 1.5) <= 1e-9, "phi=0 objective " + fmt(u0));
    MarginalRankMatrix at1 = solve_lp(build_lp(q, merits, w, 1.0));
    double u1 = policy_utility(at1, merits, w);
    c.expect(std::abs(u1 - 35.0 / 24.0) <= 1e-9, "phi=1 objective " + fmt(u1));
    double dev = max_abs_diff(at1.p, ts_marginals(q).p);
    c.expect(dev <= 1e-8, "phi=1 marginal deviation " + fmt(dev));
}

void lp_dominance_curves(Check& c) {
    auto run_curve = [&](const EmpiricalMeritDistribution& d, const PositionWeights& w,
                         const std::string& tag) {
        TopKMatrix q = exact_topk(d);
        MeritVector merits = expected_merits(MeritModel{d});
        double opt_u = policy_utility(permutation_marginals(opt_ranking(merits)), merits, w);
        double ts_u = policy_utility(ts_marginals(q), merits, w);
        double prev = opt_u;
        for (int i = 0; i <= 20; ++i) {
            double phi = i / 20.0;
            double u = policy_utility(solve_lp(build_lp(q, merits, w, phi)), merits, w);
            double mix = phi * ts_u + (1.0 - phi) * opt_u;
            c.expect(u >= mix - 1e-9, tag + ": below mixing at phi=" + fmt(phi));
            c.expect(u <= prev + 1e-9, tag + ": utility increased at phi=" + fmt(phi));
            if (i == 0) c.expect(std::abs(u - opt_u) <= 1e-9, tag + ": phi=0 != OPT");
            if (i == 20) c.expect(std::abs(u - ts_u) <= 1e-9, tag + ": phi=1 != TS");
            prev = u;
        }
    };
    run_curve(example2_distribution(), explicit_weights({1.0, 1.0, 0.0}), "example2");
    for (std::uint64_t seed = 0; seed < 50; ++seed)
        run_curve(random_empirical(5, 4 + seed % 5, seed), dcg_weights(5),
                  "instance " + std::to_string(seed));
}

void bvn_reconstruction(Check& c) {
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        const int n = 2 + static_cast<int>(seed % 11);
        const int perms = 2 + static_cast<int>(seed % 19);
        MarginalRankMatrix m = random_doubly_stochastic(n, perms, seed);
        RankingDistribution dist = bvn_decompose(m);
        c.expect(static_cast<int>(dist.entries.size()) <= n * n - 2 * n + 2,
                 "seed " + std::to_string(seed) + ": too many permutations");
        double dev = max_abs_diff(marginals_of_distribution(dist).p, m.p);
        c.expect(dev <= 1e-8, "seed " + std::to_string(seed) + ": deviation " + fmt(dev));
    }
}

void ts_one_fairness(Check& c) {
    TopKMatrix q = exact_topk(example2_distribution());
    double exact_level = fairness_level(ts_marginals(q), q).phi_star;
    c.expect(exact_level >= 1.0 - 1e-9, "exact ts_marginals phi_star " + fmt(exact_level));

    const long m = 200000;
    MeritModel model = example2_distribution();
    MarginalRankMatrix freq{3, std::vector<double>(9, 0.0)};
    for (long i = 0; i < m; ++i) {
        Ranking r = ts_sample(model, derive_seed(4242, i));
        for (int k = 1; k <= 3; ++k) freq.at(r[k - 1], k) += 1.0;
    }
    for (double& v : freq.p) v /= m;
    double level = fairness_level(freq, q).phi_star;
    c.expect(level >= 0.98, "empirical phi_star " + fmt(level));
}

void dkw_coverage(Check& c) {
    const int n = 5;
    const double eps = 0.05;
    const long m = dkw_sample_size(n, 1.0, eps);
    const int trials = 100;
    int covered = 0;
    for (int t = 0; t < trials; ++t) {
        EmpiricalMeritDistribution d = random_empirical(n, 3 + t % 6, 9000 + t);
        TopKMatrix exact = exact_topk(d);
        TopKMatrix est = monte_carlo_topk(MeritModel{d}, m, derive_seed(31337, t));
        if (max_abs_diff(exact.q, est.q) <= eps) ++covered;
    }
    // Nominal guarantee 0.80 minus a 3-sigma binomial slack at 100 trials.
    const double threshold = 0.80 - 3.0 * std::sqrt(0.8 * 0.2 / trials);
    c.note("covered " + std::to_string(covered) + "/100, m=" + std::to_string(m));
    c.expect(covered >= threshold * trials, "coverage below " + fmt(threshold));
}

// Doubly stochastic perturbation of q in first-difference space: each move
// shifts delta between two agents in one column and shifts it back in a later
// column, so all q invariants survive and every q entry moves by at most
// n * (eps / n) = eps in total.
TopKMatrix perturb_topk(const TopKMatrix& q, double eps, std::uint64_t seed) {
    const int n = q.n;
    MarginalRankMatrix p = ts_marginals(q);
    auto gen = make_engine(seed);
    std::uniform_int_distribution<int> agent(0, n - 1);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (int move = 0; move < n; ++move) {
        int x = agent(gen), y = agent(gen);
        if (x == y) continue;
        std::uniform_int_distribution<int> col(1, n - 1);
        int k = col(gen);
        std::uniform_int_distribution<int> col2(k + 1, n);
        int k2 = col2(gen);
        double cap = std::min({eps / n, 1.0 - p.at(x, k), p.at(y, k), p.at(x, k2),
                               1.0 - p.at(y, k2)});
        if (cap <= 0.0) continue;
        double delta = unif(gen) * cap;
        p.at(x, k) += delta;
        p.at(y, k) -= delta;
        p.at(x, k2) -= delta;
        p.at(y, k2) += delta;
    }
    TopKMatrix out{n, std::vector<double>(static_cast<std::size_t>(n) * n)};
    for (int x = 0; x < n; ++x) {
        double acc = 0.0;
        for (int k = 1; k <= n; ++k) {
            acc += p.at(x, k);
            out.at(x, k) = acc;
        }
    }
    return out;
}

void robust_lp_guarantee(Check& c) {
    const double eps = 0.02, phi = 0.9;
    const int n = 5;
    const double degrade = 1.0 + n * eps;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        EmpiricalMeritDistribution d = random_empirical(n, 4 + seed % 5, 500 + seed);
        TopKMatrix q = exact_topk(d);
        MeritVector merits = expected_merits(MeritModel{d});
        PositionWeights w = dcg_weights(n);

        TopKMatrix hat = perturb_topk(q, eps, 777 + seed);
        double err = max_abs_diff(hat.q, q.q);
        c.expect(err <= eps + 1e-12, "seed " + std::to_string(seed) + ": perturbation too large");

        MarginalRankMatrix m = solve_lp(build_lp(robustify(hat, eps), merits, w, phi));
        double fairness = fairness_level(m, q).phi_star;
        c.expect(fairness >= phi / degrade - 1e-6,
                 "seed " + std::to_string(seed) + ": fairness " + fmt(fairness));

        double true_opt =
            policy_utility(solve_lp(build_lp(q, merits, w, phi)), merits, w);
        double objective = policy_utility(m, merits, w);
        c.expect(objective >= true_opt / degrade - 1e-6,
                 "seed " + std::to_string(seed) + ": objective " + fmt(objective) + " vs " +
                     fmt(true_opt));
    }
}

void check_tradeoff_curve(Check& c, const TradeoffTable& table, const std::string& tag,
                          double phi1_floor) {
    double prev = 2.0;
    for (const auto& row : table.rows) {
        c.expect(row.lp_ndcg <= prev + 1e-6, tag + ": ndcg increased at phi=" + fmt(row.phi));
        prev = row.lp_ndcg;
    }
    const TradeoffRow& last = table.rows.back();
    c.note(tag + " ndcg(1)=" + fmt(last.lp_ndcg));
    c.expect(last.phi == 1.0, tag + ": grid does not end at phi=1");
    c.expect(last.lp_ndcg >= phi1_floor,
             tag + ": ndcg at phi=1 below " + fmt(phi1_floor));
}

void tradeoff_scale(Check& c) {
    // Three pseudo-genres of the default synthetic corpus keep the suite
    // inside the runtime budget on one core; each genre is an independent
    // 40-item instance of the full pipeline.
    RatingsDataset ds = default_synthetic_dataset();
    GenreExperimentConfig config;
    for (int g = 0; g < 3; ++g) {
        config.seed = 100 + g;
        std::string genre = "genre" + std::to_string(g);
        check_tradeoff_curve(c, genre_experiment(ds, genre, config), genre, 0.97);
    }

    const char* data = "ml-100k/u.data";
    const char* item = "ml-100k/u.item";
    if (std::ifstream(data).good() && std::ifstream(item).good()) {
        RatingsDataset ml = load_movielens(data, item);
        config.seed = 7;
        TradeoffTable table = genre_experiment(ml, "Comedy", config);
        check_tradeoff_curve(c, table, "ml-100k Comedy", 0.97);
    } else {
        c.note("ml-100k not present, real-data branch skipped");
    }
}

void exposure_directionality(Check& c) {
    const int items = 100, users = 50, per_arm = 200, trials = 50;
    int gini_wins = 0, zero_wins = 0;
    for (int t = 0; t < trials; ++t) {
        auto gen = make_engine(derive_seed(60000, t));
        std::uniform_real_distribution<double> attract(0.2, 1.0), pref(0.7, 1.0);
        std::vector<double> base(items);
        for (double& b : base) b = attract(gen);
        std::vector<std::vector<double>> scores(users, std::vector<double>(items));
        for (auto& row : scores) {
            double scale = pref(gen);
            for (int i = 0; i < items; ++i) row[i] = base[i] * scale;
        }
        ExposureResult r = relevance_experiment(scores, 2.0, 0.1, per_arm, 5, 70000 + t);
        if (r.ts_gini < r.opt_gini) ++gini_wins;
        long opt_zero = 0, ts_zero = 0;
        for (int i = 0; i < items; ++i) {
            opt_zero += r.opt_counts[i] == 0;
            ts_zero += r.ts_counts[i] == 0;
        }
        if (ts_zero <= opt_zero) ++zero_wins;
    }
    c.note("gini wins " + std::to_string(gini_wins) + "/50, zero-exposure wins " +
           std::to_string(zero_wins) + "/50");
    c.expect(gini_wins >= 45, "gini directionality below 45/50");
    c.expect(zero_wins >= 45, "zero-exposure directionality below 45/50");
}

}  // namespace

int main() {
    struct Criterion {
        std::string name;
        double budget_seconds;
        std::function<void(Check&)> body;
    };
    const std::vector<Criterion> criteria = {
        {"example2 exact top-k matrix", 1.0, exact_topk_example2},
        {"example2 OPT audit = 6/7", 1.0, opt_audit_example2},
        {"LP endpoints on example2", 1.0, lp_endpoints_example2},
        {"LP dominance over mixing on the phi grid", 30.0, lp_dominance_curves},
        {"BvN reconstruction, 200 random matrices", 30.0, bvn_reconstruction},
        {"TS is 1-fair (exact and at 2e5 samples)", 30.0, ts_one_fairness},
        {"DKW coverage at the prescribed sample size", 60.0, dkw_coverage},
        {"robustified LP guarantee under q noise", 30.0, robust_lp_guarantee},
        {"ratings-corpus tradeoff curves", 300.0, tradeoff_scale},
        {"TS exposure is flatter than OPT exposure", 60.0, exposure_directionality},
    };

    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Check check;
        const auto start = std::chrono::steady_clock::now();
        try {
            criteria[i].body(check);
        } catch (const std::exception& e) {
            check.expect(false, std::string("exception: ") + e.what());
        }
        const double seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        check.expect(seconds <= criteria[i].budget_seconds,
                     "runtime " + fmt(seconds) + "s over budget");
        failures += check.ok ? 0 : 1;
        std::cout << (check.ok ? "PASS" : "FAIL") << " criterion " << i + 1 << ": "
                  << criteria[i].name << " [" << fmt(seconds) << "s]";
        if (!check.detail.empty()) std::cout << " (" << check.detail << ")";
        std::cout << "\n";
    }
    if (failures > 0) std::cout << failures << " criterion(s) failed\n";
    return failures == 0 ? 0 : 1;
}
