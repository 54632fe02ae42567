#include "fairrank/audit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>

#include <json.hpp>

namespace fairrank {

FairnessReport fairness_level(const MarginalRankMatrix& m, const TopKMatrix& q) {
    if (m.n != q.n) throw std::invalid_argument("fairness_level: dimension mismatch");
    m.validate(1e-7);
    const int n = m.n;

    FairnessReport report;
    report.n = n;
    report.phi_star = std::numeric_limits<double>::infinity();
    std::vector<double> cum(static_cast<std::size_t>(n) * n);
    bool any = false;
    for (int x = 0; x < n; ++x) {
        double acc = 0.0;
        for (int k = 1; k <= n; ++k) {
            acc += m.at(x, k);
            cum[static_cast<std::size_t>(x) * n + k - 1] = acc;
            if (q.at(x, k) > 0.0) {
                any = true;
                report.phi_star = std::min(report.phi_star, acc / q.at(x, k));
            }
        }
    }
    if (!any) throw std::invalid_argument("fairness_level: all q entries zero");
    report.phi_star = std::clamp(report.phi_star, 0.0, std::numeric_limits<double>::max());

    report.slack.resize(static_cast<std::size_t>(n) * n);
    for (int x = 0; x < n; ++x)
        for (int k = 1; k <= n; ++k) {
            const std::size_t idx = static_cast<std::size_t>(x) * n + k - 1;
            report.slack[idx] = cum[idx] - report.phi_star * q.at(x, k);
            if (q.at(x, k) > 0.0 && report.slack[idx] <= 1e-12 * std::max(1.0, cum[idx]))
                report.binding.emplace_back(x, k);
        }
    return report;
}

bool is_phi_fair(const MarginalRankMatrix& m, const TopKMatrix& q, double phi, double tol) {
    return fairness_level(m, q).phi_star >= phi - tol;
}

double gini(const std::vector<double>& exposure) {
    const std::size_t n = exposure.size();
    if (n == 0) throw std::invalid_argument("gini: empty exposure vector");
    double total = 0.0;
    for (double e : exposure) {
        if (!(e >= 0.0)) throw std::invalid_argument("gini: negative exposure");
        total += e;
    }
    if (!(total > 0.0)) throw std::invalid_argument("gini: all-zero exposure");
    // O(n log n) via the sorted identity for the mean absolute difference.
    std::vector<double> sorted = exposure;
    std::sort(sorted.begin(), sorted.end());
    double weighted = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        weighted += (2.0 * (i + 1) - n - 1.0) * sorted[i];
    return weighted / (static_cast<double>(n) * total);
}

std::vector<long> exposure_counts(const std::vector<Ranking>& rankings, int top_t) {
    if (rankings.empty()) return {};
    const int n = static_cast<int>(rankings.front().size());
    if (top_t < 0 || top_t > n) throw std::invalid_argument("exposure_counts: top_t outside [0,n]");
    std::vector<long> counts(n, 0);
    for (const auto& ranking : rankings) {
        if (!is_permutation_of_n(ranking, n))
            throw std::invalid_argument("exposure_counts: invalid ranking");
        for (int k = 0; k < top_t; ++k) ++counts[ranking[k]];
    }
    return counts;
}

void write_report_json(const FairnessReport& report, std::ostream& out) {
    nlohmann::ordered_json j;
    j["phi_star"] = report.phi_star;
    j["binding"] = nlohmann::ordered_json::array();
    for (const auto& [agent, k] : report.binding)
        j["binding"].push_back({{"agent", agent}, {"k", k}});
    j["slack"] = nlohmann::ordered_json::array();
    for (int x = 0; x < report.n; ++x) {
        std::vector<double> row(report.slack.begin() + static_cast<std::size_t>(x) * report.n,
                                report.slack.begin() + static_cast<std::size_t>(x + 1) * report.n);
        j["slack"].push_back(row);
    }
    out << j.dump(2) << "\n";
}

}  // namespace fairrank
