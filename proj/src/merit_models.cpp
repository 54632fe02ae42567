#include "fairrank/merit_models.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <thread>

#include "fairrank/rng.hpp"

namespace fairrank {

int worker_count() {
    unsigned hw = std::thread::hardware_concurrency();
    if (hw == 0) hw = 1;
    if (const char* env = std::getenv("FAIRRANK_THREADS")) {
        long cap = std::strtol(env, nullptr, 10);
        if (cap >= 1 && static_cast<unsigned>(cap) < hw) hw = static_cast<unsigned>(cap);
    }
    return static_cast<int>(hw);
}

int EmpiricalMeritDistribution::agent_count() const {
    return support.empty() ? 0 : static_cast<int>(support.front().merits.size());
}

void EmpiricalMeritDistribution::validate() const {
    if (support.empty()) throw std::invalid_argument("empirical distribution: empty support");
    const std::size_t n = support.front().merits.size();
    if (n == 0) throw std::invalid_argument("empirical distribution: zero agents");
    double total = 0.0;
    for (const auto& atom : support) {
        if (atom.merits.size() != n)
            throw std::invalid_argument("empirical distribution: atom length mismatch");
        if (!(atom.probability > 0.0))
            throw std::invalid_argument("empirical distribution: nonpositive atom probability");
        for (double v : atom.merits)
            if (!std::isfinite(v))
                throw std::invalid_argument("empirical distribution: non-finite merit");
        total += atom.probability;
    }
    if (std::abs(total - 1.0) > 1e-12)
        throw std::invalid_argument("empirical distribution: probabilities do not sum to 1");
}

void DirichletMultinomialModel::validate() const {
    if (rating_levels < 2) throw std::invalid_argument("dirichlet model: rating levels < 2");
    if (alpha.empty()) throw std::invalid_argument("dirichlet model: no agents");
    for (const auto& row : alpha) {
        if (static_cast<int>(row.size()) != rating_levels)
            throw std::invalid_argument("dirichlet model: alpha length mismatch");
        for (double a : row)
            if (!(a > 0.0)) throw std::invalid_argument("dirichlet model: alpha entry <= 0");
    }
}

void GaussianRelevanceModel::validate() const {
    if (mean.empty()) throw std::invalid_argument("gaussian model: no agents");
    if (mean.size() != stddev.size())
        throw std::invalid_argument("gaussian model: mean/stddev length mismatch");
    for (double m : mean)
        if (!std::isfinite(m)) throw std::invalid_argument("gaussian model: non-finite mean");
    for (double s : stddev)
        if (!(s >= 0.0)) throw std::invalid_argument("gaussian model: negative stddev");
}

int agent_count(const MeritModel& model) {
    return std::visit([](const auto& m) { return m.agent_count(); }, model);
}

void validate(const MeritModel& model) {
    std::visit([](const auto& m) { m.validate(); }, model);
}

namespace {

MeritVector sample_impl(const EmpiricalMeritDistribution& dist, std::mt19937_64& gen) {
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    double u = unif(gen);
    double acc = 0.0;
    for (const auto& atom : dist.support) {
        acc += atom.probability;
        if (u <= acc) return atom.merits;
    }
    return dist.support.back().merits;  // u landed in rounding residue
}

MeritVector sample_impl(const DirichletMultinomialModel& model, std::mt19937_64& gen) {
    MeritVector v(model.alpha.size());
    for (std::size_t i = 0; i < model.alpha.size(); ++i) {
        double total = 0.0;
        double merit = 0.0;
        for (int r = 0; r < model.rating_levels; ++r) {
            std::gamma_distribution<double> gamma(model.alpha[i][r], 1.0);
            double g = gamma(gen);
            total += g;
            merit += (r + 1) * g;
        }
        v[i] = merit / total;
    }
    return v;
}

MeritVector sample_impl(const GaussianRelevanceModel& model, std::mt19937_64& gen) {
    MeritVector v(model.mean.size());
    std::normal_distribution<double> normal(0.0, 1.0);
    for (std::size_t i = 0; i < model.mean.size(); ++i) {
        v[i] = model.stddev[i] > 0.0 ? model.mean[i] + model.stddev[i] * normal(gen)
                                     : model.mean[i];
    }
    return v;
}

}  // namespace

MeritVector sample_merits(const MeritModel& model, std::uint64_t seed) {
    validate(model);
    auto gen = make_engine(seed);
    return sample_merits_with_engine(model, gen);
}

MeritVector sample_merits_with_engine(const MeritModel& model, std::mt19937_64& gen) {
    return std::visit([&](const auto& m) { return sample_impl(m, gen); }, model);
}

MeritVector expected_merits(const MeritModel& model) {
    validate(model);
    if (const auto* e = std::get_if<EmpiricalMeritDistribution>(&model)) {
        MeritVector out(e->agent_count(), 0.0);
        for (const auto& atom : e->support)
            for (std::size_t i = 0; i < out.size(); ++i)
                out[i] += atom.probability * atom.merits[i];
        return out;
    }
    if (const auto* d = std::get_if<DirichletMultinomialModel>(&model)) {
        MeritVector out(d->agent_count());
        for (int i = 0; i < d->agent_count(); ++i) out[i] = dirichlet_expected_merit(*d, i);
        return out;
    }
    return std::get<GaussianRelevanceModel>(model).mean;
}

DirichletMultinomialModel dirichlet_posterior_from_counts(
    const std::vector<double>& prior, const std::vector<std::vector<long>>& counts) {
    for (double a : prior)
        if (!(a > 0.0)) throw std::invalid_argument("dirichlet prior entry <= 0");
    DirichletMultinomialModel model;
    model.rating_levels = static_cast<int>(prior.size());
    model.alpha.reserve(counts.size());
    for (const auto& row : counts) {
        if (row.size() != prior.size())
            throw std::invalid_argument("dirichlet counts length mismatch with prior");
        std::vector<double> alpha(prior.size());
        for (std::size_t r = 0; r < prior.size(); ++r) {
            if (row[r] < 0) throw std::invalid_argument("dirichlet counts: negative count");
            alpha[r] = prior[r] + static_cast<double>(row[r]);
        }
        model.alpha.push_back(std::move(alpha));
    }
    model.validate();
    return model;
}

double dirichlet_expected_merit(const DirichletMultinomialModel& model, int agent) {
    const auto& alpha = model.alpha.at(static_cast<std::size_t>(agent));
    double total = std::accumulate(alpha.begin(), alpha.end(), 0.0);
    double weighted = 0.0;
    for (std::size_t r = 0; r < alpha.size(); ++r) weighted += (r + 1) * alpha[r];
    return weighted / total;
}

std::vector<double> gaussian_sigma_calibration(
    const std::vector<std::vector<double>>& scores, double gamma, double epsilon) {
    if (!(gamma > 0.0)) throw std::invalid_argument("sigma calibration: gamma <= 0");
    if (!(epsilon > 0.0)) throw std::invalid_argument("sigma calibration: epsilon <= 0");
    if (scores.empty()) throw std::invalid_argument("sigma calibration: empty score matrix");
    const std::size_t items = scores.front().size();
    std::vector<double> sigma(items);
    for (std::size_t i = 0; i < items; ++i) {
        double max_score = -std::numeric_limits<double>::infinity();
        for (const auto& row : scores) {
            if (row.size() != items)
                throw std::invalid_argument("sigma calibration: ragged score matrix");
            if (!std::isfinite(row[i]))
                throw std::invalid_argument("sigma calibration: non-finite score");
            max_score = std::max(max_score, row[i]);
        }
        sigma[i] = std::max(0.0, (1.0 + epsilon - max_score) / gamma);
    }
    return sigma;
}

EmpiricalMeritDistribution example2_distribution() {
    EmpiricalMeritDistribution dist;
    for (double vb : {0.0, 1.0})
        for (double vc : {0.0, 1.0})
            dist.support.push_back({{1.0, vb, vc}, 0.25});
    return dist;
}

}  // namespace fairrank
