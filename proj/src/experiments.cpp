#include "fairrank/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <ostream>
#include <set>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "fairrank/audit.hpp"
#include "fairrank/rng.hpp"

namespace fairrank {

std::vector<int> RatingsDataset::items_in_genre(const std::string& genre) const {
    auto it = std::find(genre_names.begin(), genre_names.end(), genre);
    if (it == genre_names.end()) throw std::invalid_argument("unknown genre: " + genre);
    const std::uint32_t bit = 1u << (it - genre_names.begin());
    std::set<int> rated;
    for (const auto& rec : records) rated.insert(rec.item);
    std::vector<int> items;
    for (int item : rated) {
        auto g = item_genres.find(item);
        if (g != item_genres.end() && (g->second & bit)) items.push_back(item);
    }
    return items;
}

std::vector<double> RatingsDataset::rating_marginals() const {
    if (records.empty()) throw std::invalid_argument("rating_marginals: no records");
    std::vector<double> p(rating_levels, 0.0);
    for (const auto& rec : records) p[rec.rating - 1] += 1.0;
    for (double& v : p) v /= static_cast<double>(records.size());
    return p;
}

namespace {

[[noreturn]] void parse_fail(const std::string& path, long line_no, const std::string& why) {
    throw std::runtime_error(path + ":" + std::to_string(line_no) + ": " + why);
}

std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, sep)) out.push_back(field);
    return out;
}

}  // namespace

RatingsDataset load_movielens(const std::string& ratings_path, const std::string& items_path) {
    RatingsDataset ds;
    ds.rating_levels = 5;
    ds.genre_names = {"Action",      "Adventure", "Animation", "Children's", "Comedy",
                      "Crime",       "Documentary", "Drama",   "Fantasy",    "Film-Noir",
                      "Horror",      "Musical",   "Mystery",   "Romance",    "Sci-Fi",
                      "Thriller",    "War",       "Western"};

    std::ifstream ratings(ratings_path);
    if (!ratings) throw std::runtime_error("cannot open ratings file: " + ratings_path);
    std::string line;
    long line_no = 0;
    while (std::getline(ratings, line)) {
        ++line_no;
        if (line.empty()) continue;
        auto fields = split(line, '\t');
        if (fields.size() != 4) parse_fail(ratings_path, line_no, "expected 4 tab-separated fields");
        RatingRecord rec;
        try {
            rec.user = std::stoi(fields[0]);
            rec.item = std::stoi(fields[1]);
            rec.rating = std::stoi(fields[2]);
            rec.timestamp = std::stoll(fields[3]);
        } catch (const std::exception&) {
            parse_fail(ratings_path, line_no, "non-numeric field");
        }
        if (rec.user < 0 || rec.item < 0) parse_fail(ratings_path, line_no, "negative id");
        if (rec.rating < 1 || rec.rating > ds.rating_levels)
            parse_fail(ratings_path, line_no, "rating outside 1..5");
        ds.records.push_back(rec);
    }
    if (ds.records.empty()) throw std::runtime_error(ratings_path + ": empty ratings file");

    std::ifstream items(items_path);
    if (!items) throw std::runtime_error("cannot open items file: " + items_path);
    line_no = 0;
    while (std::getline(items, line)) {
        ++line_no;
        if (line.empty()) continue;
        auto fields = split(line, '|');
        // 5 metadata fields followed by 19 genre flags, flag 0 = "unknown".
        if (fields.size() != 24)
            parse_fail(items_path, line_no, "expected 24 pipe-separated fields");
        int item = 0;
        try {
            item = std::stoi(fields[0]);
        } catch (const std::exception&) {
            parse_fail(items_path, line_no, "non-numeric item id");
        }
        std::uint32_t mask = 0;
        for (int g = 0; g < 18; ++g) {
            const std::string& flag = fields[6 + g];
            if (flag != "0" && flag != "1") parse_fail(items_path, line_no, "bad genre flag");
            if (flag == "1") mask |= 1u << g;
        }
        ds.item_genres[item] = mask;
    }
    if (ds.item_genres.empty()) throw std::runtime_error(items_path + ": empty items file");
    return ds;
}

RatingsDataset synthesize_ratings(const std::vector<std::vector<double>>& true_params,
                                  int ratings_per_item, std::uint64_t seed,
                                  int items_per_genre) {
    if (true_params.empty()) throw std::invalid_argument("synthesize_ratings: no items");
    if (ratings_per_item < 1) throw std::invalid_argument("synthesize_ratings: no ratings");
    const int levels = static_cast<int>(true_params.front().size());
    RatingsDataset ds;
    ds.rating_levels = levels;
    const int genres = (static_cast<int>(true_params.size()) + items_per_genre - 1) / items_per_genre;
    for (int g = 0; g < genres; ++g) ds.genre_names.push_back("genre" + std::to_string(g));

    int user = 0;
    for (std::size_t item = 0; item < true_params.size(); ++item) {
        const auto& p = true_params[item];
        if (static_cast<int>(p.size()) != levels)
            throw std::invalid_argument("synthesize_ratings: ragged parameters");
        double total = 0.0;
        for (double v : p) {
            if (!(v >= 0.0)) throw std::invalid_argument("synthesize_ratings: negative parameter");
            total += v;
        }
        if (std::abs(total - 1.0) > 1e-9)
            throw std::invalid_argument("synthesize_ratings: parameters do not sum to 1");

        double merit = 0.0;
        for (int r = 0; r < levels; ++r) merit += (r + 1) * p[r];
        ds.true_merits[static_cast<int>(item)] = merit;
        ds.item_genres[static_cast<int>(item)] =
            1u << (static_cast<int>(item) / items_per_genre);

        auto gen = make_engine(derive_seed(seed, item));
        std::discrete_distribution<int> ratings(p.begin(), p.end());
        for (int j = 0; j < ratings_per_item; ++j) {
            RatingRecord rec;
            rec.user = user++;
            rec.item = static_cast<int>(item);
            rec.rating = ratings(gen) + 1;
            rec.timestamp = j;
            ds.records.push_back(rec);
        }
    }
    return ds;
}

RatingsDataset default_synthetic_dataset(int genres, int items_per_genre, int ratings_per_item,
                                         std::uint64_t seed) {
    const int items = genres * items_per_genre;
    auto gen = make_engine(derive_seed(seed, 0xda7a5e7ULL));
    std::vector<std::vector<double>> params;
    params.reserve(items);
    // Rating profiles shaped like review data: a per-item quality level sets
    // the multinomial mean, a concentration parameter sets its spread.
    std::uniform_real_distribution<double> quality(2.4, 4.4);
    std::gamma_distribution<double> gamma_unit(3.0, 1.0);
    for (int i = 0; i < items; ++i) {
        const double mu = quality(gen);
        std::vector<double> p(5);
        double total = 0.0;
        for (int r = 1; r <= 5; ++r) {
            p[r - 1] = std::exp(-0.9 * (r - mu) * (r - mu)) * (0.25 + 0.15 * gamma_unit(gen));
            total += p[r - 1];
        }
        for (double& v : p) v /= total;
        params.push_back(std::move(p));
    }
    return synthesize_ratings(params, ratings_per_item, derive_seed(seed, 0x5a3dULL),
                              items_per_genre);
}

void TradeoffTable::validate() const {
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (i > 0 && rows[i].phi < rows[i - 1].phi)
            throw std::invalid_argument("tradeoff table: phi grid not sorted");
        if (rows[i].lp_ndcg < 0.0 || rows[i].lp_ndcg > 1.0 + 1e-9 ||
            rows[i].mixing_ndcg < 0.0 || rows[i].mixing_ndcg > 1.0 + 1e-9)
            throw std::invalid_argument("tradeoff table: ndcg outside [0,1]");
    }
}

TradeoffTable genre_experiment(const RatingsDataset& dataset, const std::string& genre,
                               const GenreExperimentConfig& config) {
    std::vector<int> pool = dataset.items_in_genre(genre);
    if (static_cast<int>(pool.size()) < config.n_items)
        throw std::runtime_error("genre_experiment: genre has fewer rated items than requested");
    const std::vector<double> marginals = dataset.rating_marginals();
    std::vector<double> prior(marginals.size());
    for (std::size_t r = 0; r < marginals.size(); ++r)
        prior[r] = std::max(config.prior_scale * marginals[r], 1e-12);

    const int n = config.n_items;
    const PositionWeights w = dcg_weights(n);
    TradeoffTable table;
    table.seed = config.seed;
    table.genre = genre;
    table.n = n;
    table.subsample = config.subsample;
    table.rows.resize(config.phi_grid.size());
    for (std::size_t i = 0; i < config.phi_grid.size(); ++i)
        table.rows[i].phi = config.phi_grid[i];

    for (int run = 0; run < config.runs; ++run) {
        auto gen = make_engine(derive_seed(config.seed, 0x100000ULL + run));

        std::vector<int> items = pool;
        std::shuffle(items.begin(), items.end(), gen);
        items.resize(n);
        std::unordered_map<int, int> index_of;
        for (int i = 0; i < n; ++i) index_of[items[i]] = i;

        // Per-rating i.i.d. subsample; prior marginals stay those of the
        // full dataset.
        std::uniform_real_distribution<double> unif(0.0, 1.0);
        std::vector<std::vector<long>> counts(n, std::vector<long>(marginals.size(), 0));
        for (const auto& rec : dataset.records) {
            if (unif(gen) >= config.subsample) continue;
            auto it = index_of.find(rec.item);
            if (it != index_of.end()) ++counts[it->second][rec.rating - 1];
        }

        DirichletMultinomialModel posterior = dirichlet_posterior_from_counts(prior, counts);
        MeritModel model = posterior;
        const MeritVector expected = expected_merits(model);
        TopKMatrix q = monte_carlo_topk(model, config.mc_samples,
                                        derive_seed(config.seed, 0x200000ULL + run));

        const MarginalRankMatrix opt = permutation_marginals(opt_ranking(expected));
        const MarginalRankMatrix ts = ts_marginals(q);
        const double opt_utility = policy_utility(opt, expected, w);
        const double ts_utility = policy_utility(ts, expected, w);

        for (std::size_t i = 0; i < config.phi_grid.size(); ++i) {
            const double phi = config.phi_grid[i];
            MarginalRankMatrix lp =
                phi >= 1.0 ? ts : solve_lp(build_lp(q, expected, w, phi));
            const double lp_utility = policy_utility(lp, expected, w);
            const double mix_utility = phi * ts_utility + (1.0 - phi) * opt_utility;
            TradeoffRow& row = table.rows[i];
            row.lp_utility += lp_utility;
            row.mixing_utility += mix_utility;
            row.lp_ndcg += ndcg(lp_utility, opt_utility);
            row.mixing_ndcg += ndcg(mix_utility, opt_utility);
            row.lp_phi_star += std::min(1.0, fairness_level(lp, q).phi_star);
        }
    }
    for (auto& row : table.rows) {
        row.lp_utility /= config.runs;
        row.mixing_utility /= config.runs;
        row.lp_ndcg /= config.runs;
        row.mixing_ndcg /= config.runs;
        row.lp_phi_star /= config.runs;
    }
    table.validate();
    return table;
}

ExposureResult relevance_experiment(const std::vector<std::vector<double>>& scores,
                                    double gamma, double epsilon, int users_per_arm,
                                    int top_t, std::uint64_t seed) {
    if (scores.empty()) throw std::invalid_argument("relevance_experiment: empty score matrix");
    for (const auto& row : scores)
        for (double s : row)
            if (!(s >= 0.0 && s <= 1.0))
                throw std::invalid_argument("relevance_experiment: score outside [0,1]");
    const int users = static_cast<int>(scores.size());
    const int items = static_cast<int>(scores.front().size());
    const std::vector<double> sigma = gaussian_sigma_calibration(scores, gamma, epsilon);

    std::vector<Ranking> opt_rankings, ts_rankings;
    opt_rankings.reserve(users_per_arm);
    ts_rankings.reserve(users_per_arm);
    for (int t = 0; t < users_per_arm; ++t) {
        const auto& s = scores[t % users];
        opt_rankings.push_back(opt_ranking(s));

        GaussianRelevanceModel draw_model{s, sigma};
        MeritModel model = draw_model;
        ts_rankings.push_back(ts_sample(model, derive_seed(seed, t)));
    }

    ExposureResult result;
    result.opt_counts = exposure_counts(opt_rankings, std::min(top_t, items));
    result.ts_counts = exposure_counts(ts_rankings, std::min(top_t, items));
    auto as_doubles = [](const std::vector<long>& counts) {
        return std::vector<double>(counts.begin(), counts.end());
    };
    result.opt_gini = gini(as_doubles(result.opt_counts));
    result.ts_gini = gini(as_doubles(result.ts_counts));
    return result;
}

namespace {

std::string fmt10(double v) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.10g", v);
    return buf;
}

}  // namespace

void write_tradeoff(const TradeoffTable& table, ExportFormat format, std::ostream& out) {
    table.validate();
    switch (format) {
        case ExportFormat::csv: {
            out << "phi,lp_utility,mixing_utility,lp_ndcg,mixing_ndcg,lp_phi_star\n";
            for (const auto& row : table.rows)
                out << fmt10(row.phi) << ',' << fmt10(row.lp_utility) << ','
                    << fmt10(row.mixing_utility) << ',' << fmt10(row.lp_ndcg) << ','
                    << fmt10(row.mixing_ndcg) << ',' << fmt10(row.lp_phi_star) << "\n";
            return;
        }
        case ExportFormat::json: {
            nlohmann::ordered_json j;
            j["seed"] = table.seed;
            j["genre"] = table.genre;
            j["n"] = table.n;
            j["subsample"] = table.subsample;
            j["rows"] = nlohmann::ordered_json::array();
            for (const auto& row : table.rows)
                j["rows"].push_back({{"phi", row.phi},
                                     {"lp_utility", row.lp_utility},
                                     {"mixing_utility", row.mixing_utility},
                                     {"lp_ndcg", row.lp_ndcg},
                                     {"mixing_ndcg", row.mixing_ndcg},
                                     {"lp_phi_star", row.lp_phi_star}});
            out << j.dump(2) << "\n";
            return;
        }
        case ExportFormat::svg_line_plot: {
            const double width = 640, height = 420, margin = 60;
            double lo = 1e300, hi = -1e300;
            for (const auto& row : table.rows) {
                lo = std::min({lo, row.lp_utility, row.mixing_utility});
                hi = std::max({hi, row.lp_utility, row.mixing_utility});
            }
            if (table.rows.empty()) { lo = 0; hi = 1; }
            if (hi <= lo) hi = lo + 1;
            auto px = [&](double phi) { return margin + phi * (width - 2 * margin); };
            auto py = [&](double u) {
                return height - margin - (u - lo) / (hi - lo) * (height - 2 * margin);
            };
            out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width
                << "\" height=\"" << height << "\">\n";
            out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
            auto polyline = [&](const char* color, auto value) {
                out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" points=\"";
                for (const auto& row : table.rows)
                    out << fmt10(px(row.phi)) << ',' << fmt10(py(value(row))) << ' ';
                out << "\"/>\n";
            };
            polyline("#1f77b4", [](const TradeoffRow& r) { return r.lp_utility; });
            polyline("#d62728", [](const TradeoffRow& r) { return r.mixing_utility; });
            out << "<text x=\"" << width / 2 << "\" y=\"" << height - 15
                << "\" text-anchor=\"middle\">phi</text>\n";
            out << "<text x=\"" << margin << "\" y=\"" << margin - 20
                << "\">utility (blue: lp, red: mixing)</text>\n";
            out << "</svg>\n";
            return;
        }
    }
}

void export_results(const TradeoffTable& table, ExportFormat format, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open output path: " + path);
    write_tradeoff(table, format, out);
    if (!out) throw std::runtime_error("write failed: " + path);
}

TradeoffTable read_tradeoff_json(std::istream& in) {
    nlohmann::json j;
    in >> j;
    TradeoffTable table;
    table.seed = j.at("seed").get<std::uint64_t>();
    table.genre = j.at("genre").get<std::string>();
    table.n = j.at("n").get<int>();
    table.subsample = j.at("subsample").get<double>();
    for (const auto& row : j.at("rows")) {
        TradeoffRow r;
        r.phi = row.at("phi").get<double>();
        r.lp_utility = row.at("lp_utility").get<double>();
        r.mixing_utility = row.at("mixing_utility").get<double>();
        r.lp_ndcg = row.at("lp_ndcg").get<double>();
        r.mixing_ndcg = row.at("mixing_ndcg").get<double>();
        r.lp_phi_star = row.at("lp_phi_star").get<double>();
        table.rows.push_back(r);
    }
    table.validate();
    return table;
}

}  // namespace fairrank
