#include "fairrank/policies.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <numeric>
#include <ostream>
#include <stdexcept>

#include <json.hpp>

#include "fairrank/rng.hpp"

namespace fairrank {

bool is_permutation_of_n(const Ranking& ranking, int n) {
    if (static_cast<int>(ranking.size()) != n) return false;
    std::vector<bool> seen(n, false);
    for (int agent : ranking) {
        if (agent < 0 || agent >= n || seen[agent]) return false;
        seen[agent] = true;
    }
    return true;
}

void RankingDistribution::validate(double tol) const {
    if (n <= 0 || entries.empty())
        throw std::invalid_argument("ranking distribution: empty");
    double total = 0.0;
    for (const auto& [perm, prob] : entries) {
        if (!is_permutation_of_n(perm, n))
            throw std::invalid_argument("ranking distribution: entry is not a permutation");
        if (!(prob > 0.0))
            throw std::invalid_argument("ranking distribution: nonpositive probability");
        total += prob;
    }
    if (std::abs(total - 1.0) > tol)
        throw std::invalid_argument("ranking distribution: probabilities do not sum to 1");
}

void MarginalRankMatrix::validate(double tol) const {
    if (n <= 0 || p.size() != static_cast<std::size_t>(n) * n)
        throw std::invalid_argument("marginal matrix: bad dimensions");
    for (double v : p)
        if (v < -tol || v > 1.0 + tol)
            throw std::invalid_argument("marginal matrix: entry outside [0,1]");
    for (int x = 0; x < n; ++x) {
        double row = 0.0;
        for (int k = 1; k <= n; ++k) row += at(x, k);
        if (std::abs(row - 1.0) > tol)
            throw std::invalid_argument("marginal matrix: row sum != 1");
    }
    for (int k = 1; k <= n; ++k) {
        double col = 0.0;
        for (int x = 0; x < n; ++x) col += at(x, k);
        if (std::abs(col - 1.0) > tol)
            throw std::invalid_argument("marginal matrix: column sum != 1");
    }
}

MarginalRankMatrix identity_marginals(int n) {
    MarginalRankMatrix m{n, std::vector<double>(static_cast<std::size_t>(n) * n, 0.0)};
    for (int x = 0; x < n; ++x) m.at(x, x + 1) = 1.0;
    return m;
}

MarginalRankMatrix permutation_marginals(const Ranking& ranking) {
    const int n = static_cast<int>(ranking.size());
    if (!is_permutation_of_n(ranking, n))
        throw std::invalid_argument("permutation_marginals: not a permutation");
    MarginalRankMatrix m{n, std::vector<double>(static_cast<std::size_t>(n) * n, 0.0)};
    for (int k = 1; k <= n; ++k) m.at(ranking[k - 1], k) = 1.0;
    return m;
}

Ranking opt_ranking(const MeritVector& expected) {
    for (double v : expected)
        if (!std::isfinite(v)) throw std::invalid_argument("opt_ranking: non-finite merit");
    Ranking order(expected.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        return expected[a] > expected[b];
    });
    return order;
}

Ranking ts_sample(const MeritModel& model, std::uint64_t seed) {
    validate(model);
    auto gen = make_engine(seed);
    MeritVector v = sample_merits_with_engine(model, gen);
    const int n = static_cast<int>(v.size());
    std::vector<double> keys(n);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (double& key : keys) key = unif(gen);
    Ranking order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        if (v[a] != v[b]) return v[a] > v[b];
        return keys[a] < keys[b];
    });
    return order;
}

Ranking mixing_sample(const MeritModel& model, double phi, std::uint64_t seed) {
    if (!(phi >= 0.0 && phi <= 1.0))
        throw std::invalid_argument("mixing_sample: phi outside [0,1]");
    validate(model);
    auto gen = make_engine(derive_seed(seed, 0x6d69784dULL));
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    if (unif(gen) < phi) return ts_sample(model, seed);
    return opt_ranking(expected_merits(model));
}

MarginalRankMatrix ts_marginals(const TopKMatrix& q) {
    q.validate();
    const int n = q.n;
    MarginalRankMatrix m{n, std::vector<double>(static_cast<std::size_t>(n) * n)};
    for (int x = 0; x < n; ++x) {
        double prev = 0.0;
        for (int k = 1; k <= n; ++k) {
            m.at(x, k) = std::max(0.0, q.at(x, k) - prev);
            prev = q.at(x, k);
        }
    }
    return m;
}

MarginalRankMatrix marginals_of_distribution(const RankingDistribution& dist) {
    dist.validate();
    MarginalRankMatrix m{dist.n,
                         std::vector<double>(static_cast<std::size_t>(dist.n) * dist.n, 0.0)};
    for (const auto& [perm, prob] : dist.entries)
        for (int k = 1; k <= dist.n; ++k) m.at(perm[k - 1], k) += prob;
    return m;
}

void write_marginals_csv(const MarginalRankMatrix& m, std::ostream& out) {
    for (int k = 1; k <= m.n; ++k) out << (k > 1 ? "," : "") << "k=" << k;
    out << "\n";
    char buf[32];
    for (int x = 0; x < m.n; ++x) {
        for (int k = 1; k <= m.n; ++k) {
            std::snprintf(buf, sizeof(buf), "%.17g", m.at(x, k));
            out << (k > 1 ? "," : "") << buf;
        }
        out << "\n";
    }
}

namespace detail {
std::vector<std::vector<double>> read_matrix_csv(std::istream& in, const char* what);
}

MarginalRankMatrix read_marginals_csv(std::istream& in) {
    auto rows = detail::read_matrix_csv(in, "marginals csv");
    const int n = static_cast<int>(rows.size());
    MarginalRankMatrix m{n, std::vector<double>(static_cast<std::size_t>(n) * n)};
    for (int x = 0; x < n; ++x)
        for (int k = 1; k <= n; ++k) m.at(x, k) = rows[x][k - 1];
    m.validate(1e-7);
    return m;
}

void write_lottery_json(const RankingDistribution& dist, std::ostream& out) {
    nlohmann::ordered_json j;
    j["n"] = dist.n;
    j["entries"] = nlohmann::ordered_json::array();
    for (const auto& [perm, prob] : dist.entries)
        j["entries"].push_back({{"perm", perm}, {"prob", prob}});
    out << j.dump(2) << "\n";
}

RankingDistribution read_lottery_json(std::istream& in) {
    nlohmann::json j;
    in >> j;
    RankingDistribution dist;
    dist.n = j.at("n").get<int>();
    for (const auto& entry : j.at("entries"))
        dist.entries.emplace_back(entry.at("perm").get<Ranking>(),
                                  entry.at("prob").get<double>());
    dist.validate();
    return dist;
}

}  // namespace fairrank
