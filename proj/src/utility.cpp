#include "fairrank/utility.hpp"

#include <cmath>
#include <stdexcept>

namespace fairrank {

void PositionWeights::validate() const {
    if (w.empty()) throw std::invalid_argument("position weights: empty");
    for (std::size_t k = 0; k < w.size(); ++k) {
        if (!(w[k] >= 0.0)) throw std::invalid_argument("position weights: negative weight");
        if (k > 0 && w[k] > w[k - 1])
            throw std::invalid_argument("position weights: not nonincreasing");
    }
}

PositionWeights dcg_weights(int n) {
    if (n < 1) throw std::invalid_argument("weights: n < 1");
    PositionWeights pw;
    pw.w.resize(n);
    for (int k = 1; k <= n; ++k) pw.w[k - 1] = 1.0 / std::log2(1.0 + k);
    return pw;
}

PositionWeights reciprocal_weights(int n) {
    if (n < 1) throw std::invalid_argument("weights: n < 1");
    PositionWeights pw;
    pw.w.resize(n);
    for (int k = 1; k <= n; ++k) pw.w[k - 1] = 1.0 / k;
    return pw;
}

PositionWeights precision_at_weights(int cutoff, int n) {
    if (n < 1) throw std::invalid_argument("weights: n < 1");
    if (cutoff < 1 || cutoff > n)
        throw std::invalid_argument("precision weights: cutoff outside [1,n]");
    PositionWeights pw;
    pw.w.assign(n, 0.0);
    for (int k = 0; k < cutoff; ++k) pw.w[k] = 1.0 / cutoff;
    return pw;
}

PositionWeights explicit_weights(std::vector<double> w) {
    PositionWeights pw{std::move(w)};
    pw.validate();
    return pw;
}

PositionWeights weights_from_spec(const std::string& spec, int n) {
    if (spec == "dcg") return dcg_weights(n);
    if (spec == "reciprocal") return reciprocal_weights(n);
    if (spec.rfind("precision:", 0) == 0) {
        int cutoff = std::stoi(spec.substr(10));
        return precision_at_weights(cutoff, n);
    }
    throw std::invalid_argument("unknown weights spec: " + spec);
}

double ranking_utility(const Ranking& ranking, const MeritVector& merits,
                       const PositionWeights& w) {
    const int n = static_cast<int>(merits.size());
    if (!is_permutation_of_n(ranking, n))
        throw std::invalid_argument("ranking_utility: invalid permutation");
    if (w.size() != n) throw std::invalid_argument("ranking_utility: weight length mismatch");
    double total = 0.0;
    for (int k = 0; k < n; ++k) total += w.w[k] * merits[ranking[k]];
    return total;
}

double policy_utility(const MarginalRankMatrix& marginals, const MeritVector& merits,
                      const PositionWeights& w) {
    const int n = marginals.n;
    if (static_cast<int>(merits.size()) != n || w.size() != n)
        throw std::invalid_argument("policy_utility: dimension mismatch");
    double total = 0.0;
    for (int x = 0; x < n; ++x) {
        double row = 0.0;
        for (int k = 1; k <= n; ++k) row += marginals.at(x, k) * w.w[k - 1];
        total += row * merits[x];
    }
    return total;
}

double ndcg(double utility, double ideal_utility) {
    if (!(ideal_utility > 0.0)) throw std::invalid_argument("ndcg: ideal utility <= 0");
    return utility / ideal_utility;
}

}  // namespace fairrank
