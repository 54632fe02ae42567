#include "fairrank/topk.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "fairrank/rng.hpp"

namespace fairrank {

void TopKMatrix::validate(double tol) const {
    if (n <= 0 || q.size() != static_cast<std::size_t>(n) * n)
        throw std::invalid_argument("topk matrix: bad dimensions");
    for (int x = 0; x < n; ++x) {
        double prev = 0.0;
        for (int k = 1; k <= n; ++k) {
            double v = at(x, k);
            if (v < -tol || v > 1.0 + tol)
                throw std::invalid_argument("topk matrix: entry outside [0,1]");
            if (v < prev - tol) throw std::invalid_argument("topk matrix: row not nondecreasing");
            prev = v;
        }
        if (std::abs(at(x, n) - 1.0) > tol)
            throw std::invalid_argument("topk matrix: last column != 1");
    }
    for (int k = 1; k <= n; ++k) {
        double sum = 0.0;
        for (int x = 0; x < n; ++x) sum += at(x, k);
        if (std::abs(sum - k) > tol)
            throw std::invalid_argument("topk matrix: column sum != k");
    }
}

TopKMatrix exact_topk(const EmpiricalMeritDistribution& dist) {
    dist.validate();
    const int n = dist.agent_count();
    TopKMatrix out{n, std::vector<double>(static_cast<std::size_t>(n) * n, 0.0)};
    for (const auto& atom : dist.support) {
        for (int x = 0; x < n; ++x) {
            int above = 0, tied = 0;
            for (int y = 0; y < n; ++y) {
                if (y == x) continue;
                if (atom.merits[y] > atom.merits[x]) ++above;
                else if (atom.merits[y] == atom.merits[x]) ++tied;
            }
            for (int k = 1; k <= n; ++k) {
                double covered = std::min<double>(std::max(k - above, 0), tied + 1);
                out.at(x, k) += atom.probability * covered / (tied + 1);
            }
        }
    }
    return out;
}

namespace {

// Position counts for samples [begin, end); counts[x][pos] is how often agent
// x landed at 0-based position pos.
void count_positions(const MeritModel& model, long begin, long end, std::uint64_t seed,
                     std::vector<long>& counts, int n) {
    std::vector<int> order(n);
    std::vector<double> keys(n);
    for (long i = begin; i < end; ++i) {
        auto gen = make_engine(derive_seed(seed, static_cast<std::uint64_t>(i)));
        // Merits first, then tie-break keys, from the same per-sample stream.
        MeritVector v = sample_merits_with_engine(model, gen);
        std::uniform_real_distribution<double> unif(0.0, 1.0);
        for (int x = 0; x < n; ++x) keys[x] = unif(gen);
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(), [&](int a, int b) {
            if (v[a] != v[b]) return v[a] > v[b];
            return keys[a] < keys[b];
        });
        for (int pos = 0; pos < n; ++pos)
            ++counts[static_cast<std::size_t>(order[pos]) * n + pos];
    }
}

}  // namespace

TopKMatrix monte_carlo_topk(const MeritModel& model, long samples, std::uint64_t seed) {
    if (samples < 1) throw std::invalid_argument("monte_carlo_topk: samples < 1");
    validate(model);
    const int n = agent_count(model);
    const int workers = std::min<long>(worker_count(), samples);
    std::vector<std::vector<long>> counts(
        workers, std::vector<long>(static_cast<std::size_t>(n) * n, 0));
    if (workers == 1) {
        count_positions(model, 0, samples, seed, counts[0], n);
    } else {
        std::vector<std::thread> threads;
        for (int w = 0; w < workers; ++w) {
            long begin = samples * w / workers;
            long end = samples * (w + 1) / workers;
            threads.emplace_back([&, w, begin, end] {
                count_positions(model, begin, end, seed, counts[w], n);
            });
        }
        for (auto& t : threads) t.join();
    }
    for (int w = 1; w < workers; ++w)
        for (std::size_t i = 0; i < counts[0].size(); ++i) counts[0][i] += counts[w][i];

    TopKMatrix out{n, std::vector<double>(static_cast<std::size_t>(n) * n, 0.0)};
    for (int x = 0; x < n; ++x) {
        long cum = 0;
        for (int k = 1; k <= n; ++k) {
            cum += counts[0][static_cast<std::size_t>(x) * n + (k - 1)];
            out.at(x, k) = static_cast<double>(cum) / static_cast<double>(samples);
        }
    }
    return out;
}

long dkw_sample_size(int n, double kappa, double eps) {
    if (n < 1) throw std::invalid_argument("dkw_sample_size: n < 1");
    if (!(kappa > 0.0)) throw std::invalid_argument("dkw_sample_size: kappa <= 0");
    if (!(eps > 0.0 && eps < 1.0)) throw std::invalid_argument("dkw_sample_size: eps outside (0,1)");
    return static_cast<long>(std::ceil((kappa + 1.0) * std::log(2.0 * n) / (2.0 * eps * eps)));
}

TopKMatrix robustify(const TopKMatrix& q, double eps) {
    if (eps < 0.0) throw std::invalid_argument("robustify: eps < 0");
    const int n = q.n;
    TopKMatrix out{n, std::vector<double>(static_cast<std::size_t>(n) * n)};
    for (int x = 0; x < n; ++x)
        for (int k = 1; k <= n; ++k)
            out.at(x, k) = k * (q.at(x, k) + eps) / (k + n * eps);
    // Max-prefix pass restores row monotonicity for pathological inputs.
    for (int x = 0; x < n; ++x)
        for (int k = 2; k <= n; ++k)
            out.at(x, k) = std::max(out.at(x, k), out.at(x, k - 1));
    return out;
}

void write_topk_csv(const TopKMatrix& q, std::ostream& out) {
    for (int k = 1; k <= q.n; ++k) out << (k > 1 ? "," : "") << "k=" << k;
    out << "\n";
    char buf[32];
    for (int x = 0; x < q.n; ++x) {
        for (int k = 1; k <= q.n; ++k) {
            std::snprintf(buf, sizeof(buf), "%.17g", q.at(x, k));
            out << (k > 1 ? "," : "") << buf;
        }
        out << "\n";
    }
}

namespace detail {

std::vector<std::vector<double>> read_matrix_csv(std::istream& in, const char* what) {
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error(std::string(what) + ": empty input");
    std::vector<std::vector<double>> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<double> row;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw std::runtime_error(std::string(what) + ": no data rows");
    for (const auto& row : rows)
        if (row.size() != rows.size())
            throw std::runtime_error(std::string(what) + ": matrix not square");
    return rows;
}

}  // namespace detail

TopKMatrix read_topk_csv(std::istream& in) {
    auto rows = detail::read_matrix_csv(in, "topk csv");
    const int n = static_cast<int>(rows.size());
    TopKMatrix out{n, std::vector<double>(static_cast<std::size_t>(n) * n)};
    for (int x = 0; x < n; ++x)
        for (int k = 1; k <= n; ++k) out.at(x, k) = rows[x][k - 1];
    out.validate();
    return out;
}

}  // namespace fairrank
