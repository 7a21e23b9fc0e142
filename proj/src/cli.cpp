#include "spikelab/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "spikelab/config.hpp"
#include "spikelab/csv.hpp"
#include "spikelab/detect.hpp"
#include "spikelab/estimate.hpp"
#include "spikelab/experiments.hpp"
#include "spikelab/ingest.hpp"
#include "spikelab/parallel.hpp"
#include "spikelab/pricing.hpp"
#include "spikelab/simulate.hpp"

namespace spikelab {

namespace {

using nlohmann::json;

constexpr double seconds_per_year = 365.0 * 86400.0;

struct InputOptions {
    std::string path;
    std::string time_column = "t";
    std::string price_column = "X";
    double step = 0.0;
    std::string gap_policy = "reject";
    std::string dedup_policy = "reject";
};

struct DetectOptions {
    double constant = 5.0;
    double varpi = 0.01;
    int order = 20;
    std::string mode = "signfiltered";
    Index min_gap = 0;
};

void add_input_options(CLI::App* cmd, InputOptions& in) {
    cmd->add_option("--in", in.path, "Spot price CSV")->required();
    cmd->add_option("--time-column", in.time_column, "Timestamp column")->capture_default_str();
    cmd->add_option("--price-column", in.price_column, "Price column")->capture_default_str();
    cmd->add_option("--step", in.step, "Grid step in timestamp units (0 infers it)")->capture_default_str();
    cmd->add_option("--gap-policy", in.gap_policy, "reject | forward_fill_max_1")->capture_default_str();
    cmd->add_option("--dedup-policy", in.dedup_policy, "reject | keep_first")->capture_default_str();
}

void add_detect_options(CLI::App* cmd, DetectOptions& d) {
    cmd->add_option("--C", d.constant, "Threshold constant")->capture_default_str();
    cmd->add_option("--varpi", d.varpi, "Threshold exponent in [0, 1/2)")->capture_default_str();
    cmd->add_option("--order,--mpv-order", d.order, "Multipower variation order")->capture_default_str();
    cmd->add_option("--mode", d.mode, "plain | signfiltered")->capture_default_str();
    cmd->add_option("--min-gap", d.min_gap, "Drop detections closer than this many steps to the previous one")
        ->capture_default_str();
}

DetectionConfig detection_config(const DetectOptions& d) {
    DetectionConfig config{d.constant, d.varpi, d.order, parse_detection_mode(d.mode)};
    validate(config);
    return config;
}

LoadedSeries load_input(const InputOptions& in) {
    IngestRules rules;
    rules.timestamp_column = in.time_column;
    rules.price_column = in.price_column;
    rules.expected_step = in.step;
    rules.gap_policy = parse_gap_policy(in.gap_policy);
    rules.dedup_policy = parse_dedup_policy(in.dedup_policy);
    return load_spot_csv(in.path, rules);
}

json ingest_json(const IngestReport& report) {
    return {{"format", to_string(report.format)}, {"step", report.step},          {"span", report.span},
            {"rows_read", report.rows_read},      {"filled", report.filled},      {"dropped_duplicates", report.dropped_duplicates}};
}

// Calendar length of the series in years, when it can be known.
std::optional<double> horizon_years(const IngestReport& report, std::optional<double> override_years) {
    if (override_years) return override_years;
    if (report.format == TimeFormat::Numeric) return std::nullopt;
    return report.span / seconds_per_year;
}

KeyValueConfig load_config(const std::string& path) {
    return path.empty() ? KeyValueConfig{} : KeyValueConfig::load(path);
}

void print_json(std::ostream& out, const json& value) { out << value.dump(2) << '\n'; }

// Text output: one "key: value" line per scalar entry, nested objects flattened with dots.
void print_text(std::ostream& out, const json& value, const std::string& prefix = "") {
    for (auto it = value.begin(); it != value.end(); ++it) {
        const std::string key = prefix.empty() ? it.key() : prefix + "." + it.key();
        if (it->is_object())
            print_text(out, *it, key);
        else
            out << key << ": " << it->dump() << '\n';
    }
}

void emit(std::ostream& out, const json& value, bool as_json) {
    if (as_json)
        print_json(out, value);
    else
        print_text(out, value);
}

json detection_json(const DetectionReport& report) {
    return {{"mode", to_string(report.mode)},
            {"count", report.count},
            {"sigma_hat", report.sigma_hat},
            {"threshold", report.threshold_abs},
            {"indices", report.indices},
            {"increments", report.increments}};
}

json pair_json(const std::pair<double, double>& p) { return json::array({p.first, p.second}); }

json price_json(const PriceWithCI& price) {
    return {{"estimate", price.estimate},
            {"ci95", pair_json(price.ci95)},
            {"stderr", price.std_error},
            {"sims", price.num_sims}};
}

TwoFactorSpec factors_from_config(const KeyValueConfig& cfg) {
    if (cfg.has("cont.kind") && cfg.get_string("cont.kind") == "two_factor")
        return std::get<TwoFactorSpec>(continuous_from_config(cfg));
    TwoFactorSpec spec;
    spec.params = PricingStudyConfig{}.factors;
    spec.curve = ForwardCurve::flat(cfg.get_double("cont.curve_level", 40.0));
    return spec;
}

SpikeParams spikes_or_default(const KeyValueConfig& cfg, std::optional<double> lambda, std::optional<double> beta,
                              const SpikeParams& fallback) {
    SpikeParams params = fallback;
    if (cfg.has("lambda")) params.intensity = cfg.get_double("lambda");
    if (cfg.has("beta")) params.reversion = cfg.get_double("beta");
    if (cfg.has("jump.kind") || cfg.has("jump.weights")) params.law = jump_law_from_config(cfg);
    if (lambda) params.intensity = *lambda;
    if (beta) params.reversion = *beta;
    validate(params);
    return params;
}

StudyConfig study_from_config(const KeyValueConfig& cfg) {
    StudyConfig config = default_study_config();
    if (cfg.has("study.lambdas") || cfg.has("study.betas")) {
        const auto lambdas = cfg.get_doubles("study.lambdas");
        const auto betas = cfg.get_doubles("study.betas");
        if (lambdas.size() != betas.size())
            throw std::invalid_argument("study.lambdas and study.betas must have the same length");
        config.params.clear();
        for (std::size_t i = 0; i < lambdas.size(); ++i) config.params.emplace_back(lambdas[i], betas[i]);
    }
    DetectionConfig base;
    base.constant = cfg.get_double("detect.C", base.constant);
    base.exponent = cfg.get_double("detect.varpi", base.exponent);
    base.mpv_order = static_cast<int>(cfg.get_int("detect.order", base.mpv_order));
    if (cfg.has("study.modes") || cfg.has("detect.C") || cfg.has("detect.varpi") || cfg.has("detect.order")) {
        std::vector<std::string> modes{"plain", "signfiltered"};
        if (cfg.has("study.modes")) modes = cfg.get_strings("study.modes");
        config.detections.clear();
        for (const auto& m : modes) {
            DetectionConfig d = base;
            d.mode = parse_detection_mode(m);
            config.detections.push_back(d);
        }
    }
    if (cfg.has("jump.kind") || cfg.has("jump.weights")) config.law = jump_law_from_config(cfg);
    if (cfg.has("cont.kind")) config.continuous = continuous_from_config(cfg);
    if (cfg.has("grid.n") || cfg.has("grid.horizon")) config.grid = grid_from_config(cfg);
    return config;
}

}  // namespace

int dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Spike detection, estimation and pricing for mean-reverting jump models of spot prices", "spikelab"};
    app.require_subcommand(1);
    unsigned threads = default_threads();
    app.add_option("--threads", threads, "Worker threads (default: SPIKELAB_THREADS or all cores)");

    // simulate
    auto* sim = app.add_subcommand("simulate", "Simulate a spot path and write it as CSV");
    std::string sim_config, sim_out, sim_truth;
    std::uint64_t sim_seed = 0;
    std::optional<Index> sim_n;
    std::optional<double> sim_horizon, sim_lambda, sim_beta;
    bool sim_json = false;
    sim->add_option("--config", sim_config, "key = value model file");
    sim->add_option("--seed", sim_seed, "Master seed")->capture_default_str();
    sim->add_option("--n", sim_n, "Number of increments (default 10000)");
    sim->add_option("--horizon", sim_horizon, "Horizon length (default 1)");
    sim->add_option("--lambda", sim_lambda, "Spike intensity (0 for none)");
    sim->add_option("--beta", sim_beta, "Spike reversion");
    sim->add_option("--out", sim_out, "Output CSV with columns t, X, Xc, Z")->required();
    sim->add_option("--truth", sim_truth, "Output CSV of true jump times and sizes (default: <out>.truth.csv)");
    sim->add_flag("--json", sim_json, "Machine-readable output");

    // detect / estimate
    auto* det = app.add_subcommand("detect", "Flag spike increments in a price series");
    InputOptions det_in;
    DetectOptions det_opts;
    std::string det_flags_out;
    bool det_json = false;
    add_input_options(det, det_in);
    add_detect_options(det, det_opts);
    det->add_option("--flags-out", det_flags_out, "Write flagged indices and increments to this CSV");
    det->add_flag("--json", det_json, "Machine-readable output");

    auto* est = app.add_subcommand("estimate", "Estimate spike intensity, reversion and jump moments");
    InputOptions est_in;
    DetectOptions est_opts;
    std::optional<double> est_years;
    bool est_json = false;
    add_input_options(est, est_in);
    add_detect_options(est, est_opts);
    est->add_option("--horizon-years", est_years, "Calendar length of the series in years, for per-year rates");
    est->add_flag("--json", est_json, "Machine-readable output");

    // price-forward
    auto* fwd = app.add_subcommand("price-forward", "Spike correction to forward prices");
    std::string fwd_config, fwd_model = "arith";
    std::optional<double> fwd_lambda, fwd_beta;
    double fwd_z = 0.0, fwd_t = 0.0, fwd_maturity = 0.0, fwd_theta = 0.0, fwd_tol = 1e-10;
    bool fwd_json = false;
    fwd->add_option("--config", fwd_config, "key = value model file");
    bool fwd_log = false;
    fwd->add_option("--model", fwd_model, "arith | log | delivery")->capture_default_str();
    fwd->add_flag("--log-model", fwd_log, "Same as --model log");
    fwd->add_option("--lambda", fwd_lambda, "Spike intensity");
    fwd->add_option("--beta", fwd_beta, "Spike reversion");
    fwd->add_option("--z", fwd_z, "Current spike level Z_t")->capture_default_str();
    fwd->add_option("--t", fwd_t, "Valuation time")->capture_default_str();
    fwd->add_option("--T", fwd_maturity, "Maturity or delivery start")->required();
    fwd->add_option("--theta", fwd_theta, "Delivery length (delivery model)");
    fwd->add_option("--tol", fwd_tol, "Quadrature tolerance (log model)")->capture_default_str();
    fwd->add_flag("--json", fwd_json, "Machine-readable output");

    // price-strip
    auto* strip = app.add_subcommand("price-strip", "Monte Carlo price of a strip of calls");
    std::string strip_config;
    std::vector<double> strip_strikes;
    std::int64_t strip_sims = 10000;
    std::uint64_t strip_seed = 0;
    Index strip_n = 8760;
    double strip_horizon = 1.0;
    std::string strip_exercises = "hourly";
    bool strip_no_spikes = false, strip_json = false, strip_antithetic = false;
    strip->add_option("--config", strip_config, "key = value model file");
    strip->add_option("--strike", strip_strikes, "Strike(s)")->required();
    strip->add_option("--sims", strip_sims, "Monte Carlo paths")->capture_default_str();
    strip->add_option("--seed", strip_seed, "Master seed")->capture_default_str();
    strip->add_option("--n", strip_n, "Exercise dates (grid points after 0)")->capture_default_str();
    strip->add_option("--horizon", strip_horizon, "Horizon in years")->capture_default_str();
    strip->add_option("--exercises", strip_exercises, "hourly (every grid time) or csv:<file> with a 't' column")
        ->capture_default_str();
    strip->add_flag("--no-spikes", strip_no_spikes, "Price without the spike component");
    strip->add_flag("--antithetic", strip_antithetic, "Pair each factor path with its mirror image");
    strip->add_flag("--json", strip_json, "Machine-readable output");

    // studies
    auto* stest = app.add_subcommand("study-estimation", "Replicate the estimator study over seeded ensembles");
    std::string stest_config, stest_out;
    Index stest_reps = 500;
    std::uint64_t stest_seed = 0;
    bool stest_full = false, stest_json = false;
    stest->add_option("--config", stest_config, "key = value study file");
    stest->add_option("--reps", stest_reps, "Replications per (lambda, beta)")->capture_default_str();
    stest->add_option("--seed", stest_seed, "Master seed")->capture_default_str();
    stest->add_option("--out", stest_out, "Output directory")->required();
    stest->add_flag("--full", stest_full, "Use 10000 replications");
    stest->add_flag("--json", stest_json, "Print the summary as JSON");

    auto* stpr = app.add_subcommand("study-pricing", "Strip prices with and without spikes");
    std::string stpr_config, stpr_out;
    std::vector<double> stpr_strikes{100.0, 200.0, 300.0};
    std::int64_t stpr_sims = 10000;
    std::uint64_t stpr_seed = 0;
    Index stpr_n = 8760;
    bool stpr_json = false;
    stpr->add_option("--config", stpr_config, "key = value model file");
    stpr->add_option("--strikes", stpr_strikes, "Strikes")->capture_default_str();
    stpr->add_option("--sims", stpr_sims, "Monte Carlo paths")->capture_default_str();
    stpr->add_option("--seed", stpr_seed, "Master seed")->capture_default_str();
    stpr->add_option("--n", stpr_n, "Exercise dates (grid points after 0)")->capture_default_str();
    stpr->add_option("--out", stpr_out, "Output directory")->required();
    stpr->add_flag("--json", stpr_json, "Print the summary as JSON");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n' << app.help();
        return 2;
    }

    try {
        if (sim->parsed()) {
            KeyValueConfig cfg = load_config(sim_config);
            if (sim_n) cfg.set("grid.n", std::to_string(*sim_n));
            if (sim_horizon) cfg.set("grid.horizon", format_double(*sim_horizon));
            if (sim_lambda) cfg.set("lambda", format_double(*sim_lambda));
            if (sim_beta) cfg.set("beta", format_double(*sim_beta));
            if (!cfg.has("lambda")) {
                cfg.set("lambda", "10");
                if (!cfg.has("beta")) cfg.set("beta", "200");
            }
            const ModelSpec model = model_from_config(cfg);
            const GridSpec grid = grid_from_config(cfg);
            const SimulatedPath path = simulate_spot(model, grid, RandomSource(sim_seed));
            write_path_csv(path, sim_out);
            if (sim_truth.empty()) sim_truth = sim_out + ".truth.csv";
            write_truth_csv(path.truth, sim_truth);
            emit(out,
                 {{"out", sim_out},
                  {"truth", sim_truth},
                  {"n", grid.n()},
                  {"horizon", grid.horizon()},
                  {"jumps", path.truth.size()},
                  {"seed", sim_seed}},
                 sim_json);
        } else if (det->parsed()) {
            const DetectionConfig config = detection_config(det_opts);
            const LoadedSeries series = load_input(det_in);
            DetectionReport report = detect_jumps(series.path, config);
            if (det_opts.min_gap > 0) report = apply_min_gap(report, det_opts.min_gap);
            if (!det_flags_out.empty()) {
                CsvTable flags;
                flags.header = {"index", "t", "increment"};
                for (std::size_t q = 0; q < report.indices.size(); ++q)
                    flags.rows.push_back({std::to_string(report.indices[q]),
                                          format_double(series.path.grid().time(report.indices[q])),
                                          format_double(report.increments[q])});
                write_csv(det_flags_out, flags);
            }
            json result = detection_json(report);
            result["ingest"] = ingest_json(series.report);
            if (det_json)
                print_json(out, result);
            else {
                result.erase("increments");
                print_text(out, result);
            }
        } else if (est->parsed()) {
            const DetectionConfig config = detection_config(est_opts);
            const LoadedSeries series = load_input(est_in);
            EstimationResult result = estimate_spikes(series.path, config);
            if (est_opts.min_gap > 0) {
                // Re-estimate on the thinned detections.
                const DetectionReport thinned = apply_min_gap(result.detection, est_opts.min_gap);
                const LambdaEstimate lam = estimate_lambda(thinned, series.path.grid());
                const BetaEstimate beta = estimate_beta(series.path, thinned);
                result.detection = thinned;
                result.estimates.count = thinned.count;
                result.estimates.lambda_hat = lam.lambda_hat;
                result.estimates.lambda_ci = lam.ci95;
                result.estimates.beta_hat = beta.beta_hat;
                result.estimates.slope_hat = beta.slope_hat;
                result.estimates.beta_undefined = beta.undefined;
                result.estimates.floored = beta.floored;
                result.estimates.boundary_drops = beta.boundary_drops;
                result.estimates.moment_estimates.clear();
                for (int m : {1, 2})
                    if (auto v = estimate_jump_moments(series.path, thinned, beta.beta_hat, m))
                        result.estimates.moment_estimates[m] = *v;
                result.estimates.sign_mass = estimate_sign_mass(thinned);
                result.estimates.diagnostics.reset();
            }
            const SpikeEstimates& e = result.estimates;
            json doc{{"mode", to_string(config.mode)},
                     {"count", e.count},
                     {"sigma_hat", result.detection.sigma_hat},
                     {"threshold", result.detection.threshold_abs},
                     {"lambda_hat", e.lambda_hat},
                     {"lambda_ci95", pair_json(e.lambda_ci)},
                     {"beta_hat", e.beta_hat},
                     {"slope_hat", e.slope_hat},
                     {"beta_undefined", e.beta_undefined},
                     {"floored", e.floored},
                     {"boundary_drops", e.boundary_drops}};
            json moments = json::object();
            for (const auto& [order, value] : e.moment_estimates) moments[std::to_string(order)] = value;
            doc["moments"] = moments;
            doc["sign_mass"] = e.sign_mass ? json(*e.sign_mass) : json(nullptr);
            if (e.diagnostics) {
                const auto& d = *e.diagnostics;
                doc["diagnostics"] = {{"bias_term", d.bias_term},
                                      {"error_components", d.error_components},
                                      {"relative_error_bound", d.relative_error_bound}};
            }
            if (const auto years = horizon_years(series.report, est_years)) {
                if (!(*years > 0.0)) throw std::invalid_argument("horizon in years must be positive");
                doc["per_year"] = {{"horizon_years", *years},
                                   {"lambda", e.lambda_hat / *years},
                                   {"beta", e.beta_hat / *years}};
            }
            doc["ingest"] = ingest_json(series.report);
            emit(out, doc, est_json);
        } else if (fwd->parsed()) {
            const KeyValueConfig cfg = load_config(fwd_config);
            const SpikeParams params =
                spikes_or_default(cfg, fwd_lambda, fwd_beta, SpikeParams{10.0, 200.0, study_jump_law()});
            if (fwd_log) fwd_model = "log";
            if (fwd_theta > 0.0 && fwd_model == "arith") fwd_model = "delivery";
            double value = 0.0;
            if (fwd_model == "arith")
                value = forward_spike_arith(fwd_z, params, fwd_t, fwd_maturity);
            else if (fwd_model == "log")
                value = forward_spike_log(fwd_z, params, fwd_t, fwd_maturity, fwd_tol);
            else if (fwd_model == "delivery")
                value = forward_spike_delivery(fwd_z, params, fwd_t, fwd_maturity, fwd_theta);
            else
                throw std::invalid_argument("unknown forward model '" + fwd_model + "' (arith | log | delivery)");
            emit(out, {{"model", fwd_model}, {"spike_forward", value}}, fwd_json);
        } else if (strip->parsed()) {
            const KeyValueConfig cfg = load_config(strip_config);
            const TwoFactorSpec factors = factors_from_config(cfg);
            StripModel model{factors.params, factors.curve, std::nullopt};
            if (!strip_no_spikes)
                model.spikes = spikes_or_default(cfg, std::nullopt, std::nullopt,
                                                 PricingStudyConfig::default_pricing_spikes());
            const GridSpec grid(strip_n, strip_horizon);
            std::vector<double> exercises;
            if (strip_exercises == "hourly")
                exercises = hourly_exercises(grid);
            else if (strip_exercises.rfind("csv:", 0) == 0) {
                const CsvTable table = read_csv(strip_exercises.substr(4));
                const std::size_t col = table.column("t");
                for (const auto& row : table.rows) exercises.push_back(parse_timestamp(row[col], TimeFormat::Numeric));
            } else
                throw std::invalid_argument("--exercises must be 'hourly' or 'csv:<file>'");
            const auto prices = price_strips_mc(model, exercises, strip_strikes, strip_sims, strip_seed, grid, threads,
                                                strip_antithetic);
            json rows = json::array();
            for (std::size_t k = 0; k < prices.size(); ++k) {
                json row = price_json(prices[k]);
                row["strike"] = strip_strikes[k];
                rows.push_back(row);
            }
            if (strip_json) {
                json doc = rows.size() == 1 ? rows[0] : json::object();
                doc["spikes"] = !strip_no_spikes;
                doc["antithetic"] = strip_antithetic;
                doc["prices"] = rows;
                print_json(out, doc);
            }
            else
                for (const auto& row : rows)
                    out << "strike " << row["strike"].dump() << ": " << row["estimate"].dump() << " ["
                        << row["ci95"][0].dump() << ", " << row["ci95"][1].dump() << "]\n";
        } else if (stest->parsed()) {
            StudyConfig config = study_from_config(load_config(stest_config));
            config.replications = stest_full ? 10000 : stest_reps;
            config.master_seed = stest_seed;
            const StudyResult result = run_estimation_study(config, threads);
            write_study_outputs(result, stest_out);
            if (stest_json)
                out << study_summary_json(result) << '\n';
            else
                write_csv(out, study_table(result));
        } else if (stpr->parsed()) {
            const KeyValueConfig cfg = load_config(stpr_config);
            PricingStudyConfig config;
            const TwoFactorSpec factors = factors_from_config(cfg);
            config.factors = factors.params;
            config.curve = factors.curve;
            config.spikes = spikes_or_default(cfg, std::nullopt, std::nullopt, config.spikes);
            config.strikes = stpr_strikes;
            config.num_sims = stpr_sims;
            config.seed = stpr_seed;
            config.grid = GridSpec(stpr_n, 1.0);
            const auto rows = run_pricing_study(config, threads);
            write_pricing_outputs(rows, stpr_out);
            if (stpr_json)
                out << pricing_summary_json(rows) << '\n';
            else
                write_csv(out, pricing_table(rows));
        }
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}

}  // namespace spikelab
