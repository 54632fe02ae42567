#include "fairrank/cli.hpp"

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "fairrank/audit.hpp"
#include "fairrank/experiments.hpp"
#include "fairrank/lp_fair.hpp"
#include "fairrank/rng.hpp"

namespace fairrank {

namespace {

MeritModel model_from_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open model file: " + path);
    nlohmann::json j;
    in >> j;
    const std::string type = j.at("type").get<std::string>();
    if (type == "empirical") {
        EmpiricalMeritDistribution dist;
        for (const auto& atom : j.at("atoms"))
            dist.support.push_back(
                {atom.at("merits").get<MeritVector>(), atom.at("prob").get<double>()});
        dist.validate();
        return dist;
    }
    if (type == "dirichlet") {
        DirichletMultinomialModel model;
        model.alpha = j.at("alpha").get<std::vector<std::vector<double>>>();
        model.rating_levels = model.alpha.empty() ? 0 : static_cast<int>(model.alpha[0].size());
        model.validate();
        return model;
    }
    if (type == "gaussian") {
        GaussianRelevanceModel model;
        model.mean = j.at("mean").get<std::vector<double>>();
        model.stddev = j.at("stddev").get<std::vector<double>>();
        model.validate();
        return model;
    }
    throw std::runtime_error("unknown model type: " + type);
}

MeritVector merits_from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open merits file: " + path);
    MeritVector merits;
    double v;
    while (in >> v) merits.push_back(v);
    if (merits.empty()) throw std::runtime_error("merits file is empty: " + path);
    return merits;
}

TopKMatrix topk_from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open q file: " + path);
    return read_topk_csv(in);
}

std::vector<std::vector<double>> scores_from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open scores file: " + path);
    std::vector<std::vector<double>> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<double> row;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
        if (!rows.empty() && row.size() != rows.front().size())
            throw std::runtime_error("scores file: ragged rows in " + path);
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw std::runtime_error("scores file is empty: " + path);
    return rows;
}

std::ofstream open_output(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open output path: " + path);
    return out;
}

ExportFormat parse_format(const std::string& format) {
    if (format == "csv") return ExportFormat::csv;
    if (format == "json") return ExportFormat::json;
    if (format == "svg") return ExportFormat::svg_line_plot;
    throw std::invalid_argument("--format: must be csv, json, or svg");
}

struct InstanceArgs {
    bool example2 = false;
    std::string q_path;
    std::string merits_path;
    std::string weights = "dcg";

    void add_flags(CLI::App* cmd) {
        cmd->add_flag("--example2", example2, "Use the built-in three-agent fixture");
        cmd->add_option("--q", q_path, "Top-k probability matrix CSV");
        cmd->add_option("--merits", merits_path, "Expected merits, one value per line");
        cmd->add_option("--weights", weights, "Position weights: dcg|reciprocal|precision:K");
    }

    // Returns (q, expected merits, weights). The fixture uses the weights
    // (1, 1, 0) from its defining instance unless overridden.
    std::tuple<TopKMatrix, MeritVector, PositionWeights> load(bool weights_overridden) const {
        if (example2) {
            TopKMatrix q = exact_topk(example2_distribution());
            MeritVector expected = expected_merits(MeritModel{example2_distribution()});
            PositionWeights w = weights_overridden ? weights_from_spec(weights, q.n)
                                                   : explicit_weights({1.0, 1.0, 0.0});
            return {std::move(q), std::move(expected), std::move(w)};
        }
        if (q_path.empty() || merits_path.empty())
            throw CLI::ValidationError("instance", "need --example2 or both --q and --merits");
        TopKMatrix q = topk_from_file(q_path);
        MeritVector expected = merits_from_file(merits_path);
        if (static_cast<int>(expected.size()) != q.n)
            throw std::runtime_error("merits length does not match q dimension");
        PositionWeights w = weights_from_spec(weights, q.n);
        return {std::move(q), std::move(expected), std::move(w)};
    }
};

int dispatch(int argc, const char* const* argv, std::ostream& out) {
    CLI::App app{"fair ranking under uncertain merit: top-k estimation, LP policies, audits"};
    app.require_subcommand(1);

    // --- topk ---
    auto* topk_cmd = app.add_subcommand("topk", "Estimate or compute top-k probabilities");
    bool topk_example2 = false, topk_exact = false;
    std::string topk_model_path, topk_out;
    long topk_samples = 0;
    std::uint64_t topk_seed = 0;
    double topk_kappa = 1.0, topk_eps = 0.0, topk_robust_eps = -1.0;
    topk_cmd->add_flag("--example2", topk_example2, "Use the built-in three-agent fixture");
    topk_cmd->add_option("--model", topk_model_path, "Merit model JSON");
    topk_cmd->add_flag("--exact", topk_exact, "Exact enumeration (empirical models only)");
    topk_cmd->add_option("--samples", topk_samples, "Monte Carlo sample count");
    topk_cmd->add_option("--kappa", topk_kappa, "DKW confidence exponent");
    topk_cmd->add_option("--epsilon", topk_eps, "DKW target accuracy; sets --samples if given");
    topk_cmd->add_option("--seed", topk_seed, "RNG seed");
    topk_cmd->add_option("--robustify", topk_robust_eps, "Apply the estimate-error correction");
    topk_cmd->add_option("--out", topk_out, "Output CSV path (default stdout)");

    // --- solve ---
    auto* solve_cmd = app.add_subcommand("solve", "Solve the phi-fair LP and decompose it");
    InstanceArgs solve_inst;
    solve_inst.add_flags(solve_cmd);
    double solve_phi = 0.0;
    std::string solve_prefix;
    solve_cmd->add_option("--phi", solve_phi, "Fairness level in [0,1]")->required();
    solve_cmd->add_option("--out-prefix", solve_prefix,
                          "Writes <prefix>.marginals.csv, <prefix>.lottery.json, <prefix>.report.json");

    // --- audit ---
    auto* audit_cmd = app.add_subcommand("audit", "Audit marginals against top-k probabilities");
    std::string audit_marginals, audit_q, audit_out;
    bool audit_example2 = false;
    audit_cmd->add_option("--marginals", audit_marginals, "Marginal rank matrix CSV")->required();
    audit_cmd->add_option("--q", audit_q, "Top-k probability matrix CSV");
    audit_cmd->add_flag("--example2", audit_example2, "Audit against the fixture's exact q");
    audit_cmd->add_option("--out", audit_out, "Output JSON path (default stdout)");

    // --- sample ---
    auto* sample_cmd = app.add_subcommand("sample", "Draw rankings from a lottery");
    std::string sample_lottery;
    long sample_count = 1;
    std::uint64_t sample_seed = 0;
    sample_cmd->add_option("--lottery", sample_lottery, "Lottery JSON")->required();
    sample_cmd->add_option("--count", sample_count, "Number of rankings to draw");
    sample_cmd->add_option("--seed", sample_seed, "RNG seed");

    // --- tradeoff ---
    auto* tradeoff_cmd = app.add_subcommand("tradeoff", "Utility-vs-phi curve for an instance");
    InstanceArgs tradeoff_inst;
    tradeoff_inst.add_flags(tradeoff_cmd);
    double tradeoff_step = 0.05;
    std::string tradeoff_format = "csv", tradeoff_out;
    tradeoff_cmd->add_option("--grid-step", tradeoff_step, "phi grid step");
    tradeoff_cmd->add_option("--format", tradeoff_format, "csv|json|svg");
    tradeoff_cmd->add_option("--out", tradeoff_out, "Output path (default stdout)");

    // --- movielens ---
    auto* ml_cmd = app.add_subcommand("movielens", "Genre tradeoff experiment");
    std::string ml_ratings, ml_items, ml_genre = "genre0", ml_format = "csv", ml_out;
    bool ml_synthetic = false;
    GenreExperimentConfig ml_config;
    ml_cmd->add_option("--ratings", ml_ratings, "ML-100K u.data path");
    ml_cmd->add_option("--items", ml_items, "ML-100K u.item path");
    ml_cmd->add_flag("--synthetic", ml_synthetic, "Use the built-in synthetic dataset");
    ml_cmd->add_option("--genre", ml_genre, "Genre name");
    ml_cmd->add_option("--n-items", ml_config.n_items, "Items per ranking");
    ml_cmd->add_option("--subsample", ml_config.subsample, "Per-rating subsample fraction");
    ml_cmd->add_option("--samples", ml_config.mc_samples, "Monte Carlo samples for q");
    ml_cmd->add_option("--runs", ml_config.runs, "Independent runs to average");
    ml_cmd->add_option("--seed", ml_config.seed, "RNG seed");
    ml_cmd->add_option("--format", ml_format, "csv|json|svg");
    ml_cmd->add_option("--out", ml_out, "Output path (default stdout)");

    // --- exposure ---
    auto* exp_cmd = app.add_subcommand("exposure", "OPT-vs-TS exposure comparison");
    std::string exp_scores, exp_out;
    bool exp_synthetic = false;
    int exp_users = 200, exp_items = 100, exp_top_t = 5;
    double exp_gamma = 2.0, exp_epsilon = 0.1;
    std::uint64_t exp_seed = 0;
    exp_cmd->add_option("--scores", exp_scores, "Score matrix CSV, one row per user");
    exp_cmd->add_flag("--synthetic", exp_synthetic, "Generate a synthetic score matrix");
    exp_cmd->add_option("--users", exp_users, "Users per arm");
    exp_cmd->add_option("--items", exp_items, "Items (synthetic matrix only)");
    exp_cmd->add_option("--gamma", exp_gamma, "Sigma calibration gamma");
    exp_cmd->add_option("--epsilon", exp_epsilon, "Sigma calibration epsilon");
    exp_cmd->add_option("--top-t", exp_top_t, "Exposure cutoff");
    exp_cmd->add_option("--seed", exp_seed, "RNG seed");
    exp_cmd->add_option("--out", exp_out, "Output JSON path (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, out);
    } catch (const CLI::ParseError& e) {
        std::ostringstream sink;
        app.exit(e, sink, sink);
        throw std::invalid_argument(sink.str());
    }

    if (topk_cmd->parsed()) {
        MeritModel model = topk_example2 ? MeritModel{example2_distribution()}
                           : !topk_model_path.empty()
                               ? model_from_json_file(topk_model_path)
                               : throw std::invalid_argument("topk: need --example2 or --model");
        TopKMatrix q;
        if (topk_exact) {
            const auto* emp = std::get_if<EmpiricalMeritDistribution>(&model);
            if (!emp) throw std::invalid_argument("topk --exact requires an empirical model");
            q = exact_topk(*emp);
        } else {
            long m = topk_samples;
            if (topk_eps > 0.0) m = dkw_sample_size(agent_count(model), topk_kappa, topk_eps);
            if (m < 1) throw std::invalid_argument("topk: need --samples or --epsilon");
            q = monte_carlo_topk(model, m, topk_seed);
        }
        if (topk_robust_eps >= 0.0) q = robustify(q, topk_robust_eps);
        if (topk_out.empty()) {
            write_topk_csv(q, out);
        } else {
            auto f = open_output(topk_out);
            write_topk_csv(q, f);
        }
        return 0;
    }

    if (solve_cmd->parsed()) {
        auto [q, expected, w] = solve_inst.load(solve_cmd->count("--weights") > 0);
        RankingDistribution lottery = lp_policy(q, expected, w, solve_phi);
        MarginalRankMatrix marginals = marginals_of_distribution(lottery);
        FairnessReport report = fairness_level(marginals, q);
        char buf[48];
        std::snprintf(buf, sizeof(buf), "%.12g", policy_utility(marginals, expected, w));
        out << "objective " << buf << "\n";
        std::snprintf(buf, sizeof(buf), "%.12g", report.phi_star);
        out << "phi_star " << buf << "\n";
        if (!solve_prefix.empty()) {
            auto mf = open_output(solve_prefix + ".marginals.csv");
            write_marginals_csv(marginals, mf);
            auto lf = open_output(solve_prefix + ".lottery.json");
            write_lottery_json(lottery, lf);
            auto rf = open_output(solve_prefix + ".report.json");
            write_report_json(report, rf);
        } else {
            write_marginals_csv(marginals, out);
        }
        return 0;
    }

    if (audit_cmd->parsed()) {
        std::ifstream mf(audit_marginals);
        if (!mf) throw std::runtime_error("cannot open marginals file: " + audit_marginals);
        MarginalRankMatrix marginals = read_marginals_csv(mf);
        TopKMatrix q = audit_example2 ? exact_topk(example2_distribution())
                       : !audit_q.empty()
                           ? topk_from_file(audit_q)
                           : throw std::invalid_argument("audit: need --example2 or --q");
        FairnessReport report = fairness_level(marginals, q);
        if (audit_out.empty()) {
            write_report_json(report, out);
        } else {
            auto f = open_output(audit_out);
            write_report_json(report, f);
        }
        return 0;
    }

    if (sample_cmd->parsed()) {
        std::ifstream lf(sample_lottery);
        if (!lf) throw std::runtime_error("cannot open lottery file: " + sample_lottery);
        RankingDistribution lottery = read_lottery_json(lf);
        for (long i = 0; i < sample_count; ++i) {
            auto gen = make_engine(derive_seed(sample_seed, i));
            std::uniform_real_distribution<double> unif(0.0, 1.0);
            double u = unif(gen), acc = 0.0;
            const Ranking* pick = &lottery.entries.back().first;
            for (const auto& [perm, prob] : lottery.entries) {
                acc += prob;
                if (u <= acc) { pick = &perm; break; }
            }
            for (std::size_t k = 0; k < pick->size(); ++k)
                out << (k ? " " : "") << (*pick)[k];
            out << "\n";
        }
        return 0;
    }

    if (tradeoff_cmd->parsed()) {
        if (!(tradeoff_step > 0.0 && tradeoff_step <= 1.0))
            throw std::invalid_argument("tradeoff: --grid-step outside (0,1]");
        auto [q, expected, w] = tradeoff_inst.load(tradeoff_cmd->count("--weights") > 0);
        TradeoffTable table;
        table.genre = "instance";
        table.n = q.n;
        const MarginalRankMatrix opt = permutation_marginals(opt_ranking(expected));
        const MarginalRankMatrix ts = ts_marginals(q);
        const double opt_utility = policy_utility(opt, expected, w);
        const double ts_utility = policy_utility(ts, expected, w);
        for (double phi = 0.0; phi <= 1.0 + 1e-12; phi += tradeoff_step) {
            phi = std::min(phi, 1.0);
            MarginalRankMatrix lp = phi >= 1.0 ? ts : solve_lp(build_lp(q, expected, w, phi));
            TradeoffRow row;
            row.phi = phi;
            row.lp_utility = policy_utility(lp, expected, w);
            row.mixing_utility = phi * ts_utility + (1.0 - phi) * opt_utility;
            row.lp_ndcg = ndcg(row.lp_utility, opt_utility);
            row.mixing_ndcg = ndcg(row.mixing_utility, opt_utility);
            row.lp_phi_star = std::min(1.0, fairness_level(lp, q).phi_star);
            table.rows.push_back(row);
            if (phi >= 1.0) break;
        }
        if (tradeoff_out.empty()) {
            write_tradeoff(table, parse_format(tradeoff_format), out);
        } else {
            export_results(table, parse_format(tradeoff_format), tradeoff_out);
        }
        return 0;
    }

    if (ml_cmd->parsed()) {
        RatingsDataset dataset;
        if (ml_synthetic) {
            dataset = default_synthetic_dataset();
        } else if (!ml_ratings.empty() && !ml_items.empty()) {
            dataset = load_movielens(ml_ratings, ml_items);
            if (ml_cmd->count("--genre") == 0) ml_genre = "Comedy";
        } else {
            throw std::invalid_argument("movielens: need --synthetic or --ratings and --items");
        }
        TradeoffTable table = genre_experiment(dataset, ml_genre, ml_config);
        if (ml_out.empty()) {
            write_tradeoff(table, parse_format(ml_format), out);
        } else {
            export_results(table, parse_format(ml_format), ml_out);
        }
        return 0;
    }

    if (exp_cmd->parsed()) {
        std::vector<std::vector<double>> scores;
        if (!exp_scores.empty()) {
            scores = scores_from_file(exp_scores);
        } else if (exp_synthetic) {
            auto gen = make_engine(derive_seed(exp_seed, 0x5c03e5ULL));
            std::uniform_real_distribution<double> attract(0.2, 1.0), pref(0.5, 1.0);
            std::vector<double> item_base(exp_items);
            for (double& b : item_base) b = attract(gen);
            scores.resize(exp_users);
            for (auto& row : scores) {
                row.resize(exp_items);
                const double user_scale = pref(gen);
                for (int i = 0; i < exp_items; ++i) row[i] = item_base[i] * user_scale;
            }
        } else {
            throw std::invalid_argument("exposure: need --scores or --synthetic");
        }
        ExposureResult result = relevance_experiment(scores, exp_gamma, exp_epsilon, exp_users,
                                                     exp_top_t, exp_seed);
        nlohmann::ordered_json j;
        j["opt_gini"] = result.opt_gini;
        j["ts_gini"] = result.ts_gini;
        j["opt_counts"] = result.opt_counts;
        j["ts_counts"] = result.ts_counts;
        if (exp_out.empty()) {
            out << j.dump(2) << "\n";
        } else {
            auto f = open_output(exp_out);
            f << j.dump(2) << "\n";
        }
        return 0;
    }

    throw std::invalid_argument("no subcommand given");
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    try {
        return dispatch(argc, argv, out);
    } catch (const std::invalid_argument& e) {
        err << "usage error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    }
}

}  // namespace fairrank
