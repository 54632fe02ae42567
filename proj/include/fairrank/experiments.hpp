#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <unordered_map>
#include <vector>

#include "fairrank/lp_fair.hpp"
#include "fairrank/merit_models.hpp"

namespace fairrank {

struct RatingRecord {
    int user = 0;
    int item = 0;
    int rating = 0;
    long long timestamp = 0;
};

struct RatingsDataset {
    int rating_levels = 5;
    std::vector<RatingRecord> records;
    std::vector<std::string> genre_names;
    std::unordered_map<int, std::uint32_t> item_genres;  // bitmask over genre_names
    // Ground-truth mean ratings per item, retained for synthetic data only.
    std::unordered_map<int, double> true_merits;

    std::vector<int> items_in_genre(const std::string& genre) const;
    // Marginal probability of each rating level over all records.
    std::vector<double> rating_marginals() const;
};

// ML-100K format: u.data is tab-separated (user, item, rating, timestamp);
// u.item is pipe-separated with 19 trailing binary genre flags, flag 0 being
// "unknown". Malformed lines are reported with their line number.
RatingsDataset load_movielens(const std::string& ratings_path, const std::string& items_path);

// Desk-scale substitute for ML-100K: i.i.d. multinomial ratings per item from
// the given true parameter vectors, grouped into pseudo-genres of equal size.
RatingsDataset synthesize_ratings(const std::vector<std::vector<double>>& true_params,
                                  int ratings_per_item, std::uint64_t seed,
                                  int items_per_genre = 40);

// Generator for the default synthetic corpus: genres * items_per_genre items
// with heterogeneous multinomial rating parameters.
RatingsDataset default_synthetic_dataset(int genres = 18, int items_per_genre = 40,
                                         int ratings_per_item = 120,
                                         std::uint64_t seed = 1);

struct TradeoffRow {
    double phi = 0.0;
    double lp_utility = 0.0;
    double mixing_utility = 0.0;
    double lp_ndcg = 0.0;
    double mixing_ndcg = 0.0;
    double lp_phi_star = 0.0;
};

struct TradeoffTable {
    std::vector<TradeoffRow> rows;  // sorted ascending by phi
    std::uint64_t seed = 0;
    std::string genre;
    int n = 0;
    double subsample = 0.0;

    void validate() const;
};

struct GenreExperimentConfig {
    int n_items = 40;
    double subsample = 0.10;
    double prior_scale = 1.0;  // s in alpha_r = s * p_r
    std::vector<double> phi_grid = {0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0};
    long mc_samples = 50000;
    int runs = 20;
    std::uint64_t seed = 0;
};

// Per run: subsample ratings i.i.d., build Dirichlet posteriors with prior
// marginals from the full dataset, estimate q by Monte Carlo, evaluate the LP
// and mixing policies with DCG weights on the phi grid; average across runs.
TradeoffTable genre_experiment(const RatingsDataset& dataset, const std::string& genre,
                               const GenreExperimentConfig& config = {});

struct ExposureResult {
    std::vector<long> opt_counts;
    std::vector<long> ts_counts;
    double opt_gini = 0.0;
    double ts_gini = 0.0;
};

// OPT arm ranks each user by S(u, .); TS arm ranks by one Gaussian draw per
// item with sigma from gaussian_sigma_calibration.
ExposureResult relevance_experiment(const std::vector<std::vector<double>>& scores,
                                    double gamma, double epsilon, int users_per_arm,
                                    int top_t, std::uint64_t seed);

enum class ExportFormat { csv, json, svg_line_plot };

// CSV header: "phi,lp_utility,mixing_utility,lp_ndcg,mixing_ndcg,lp_phi_star";
// values printed with 10 significant digits. SVG is a utility-vs-phi line
// chart. JSON round-trips to an equal table.
void export_results(const TradeoffTable& table, ExportFormat format, const std::string& path);
void write_tradeoff(const TradeoffTable& table, ExportFormat format, std::ostream& out);
TradeoffTable read_tradeoff_json(std::istream& in);

}  // namespace fairrank
