#include "spikelab/experiments.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <stdexcept>

#include "spikelab/estimate.hpp"
#include "spikelab/parallel.hpp"
#include "spikelab/simulate.hpp"

namespace spikelab {

namespace {

using nlohmann::json;

double mean_of(const std::vector<double>& values) {
    if (values.empty()) return std::nan("");
    double sum = 0.0;
    for (double v : values) sum += v;
    return sum / static_cast<double>(values.size());
}

bool detection_is_exact(const DetectionReport& report, const std::vector<JumpRecord>& truth, const GridSpec& grid) {
    std::set<Index> intervals;
    for (const JumpRecord& r : truth)
        if (!intervals.insert(grid.interval_of(r.time)).second) return false;
    return std::equal(report.indices.begin(), report.indices.end(), intervals.begin(), intervals.end());
}

json interval_json(const std::pair<double, double>& interval) { return json::array({interval.first, interval.second}); }

json price_json(const PriceWithCI& price) {
    return {{"estimate", price.estimate},
            {"ci95", interval_json(price.ci95)},
            {"stderr", price.std_error},
            {"sims", price.num_sims}};
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << text << '\n';
}

}  // namespace

StudyConfig default_study_config() {
    StudyConfig config;
    config.params = {{10.0, 20.0}, {10.0, 200.0}, {10.0, 2000.0}, {10.0, 20000.0}};
    DetectionConfig plain;
    plain.mode = DetectionMode::PlainThreshold;
    DetectionConfig filtered;
    filtered.mode = DetectionMode::SignFiltered;
    config.detections = {plain, filtered};
    return config;
}

void validate(const StudyConfig& config) {
    if (config.replications < 2) throw std::invalid_argument("a study needs at least 2 replications");
    if (config.params.empty()) throw std::invalid_argument("a study needs at least one (lambda, beta) pair");
    if (config.detections.empty()) throw std::invalid_argument("a study needs at least one detection mode");
    for (const auto& [lambda, beta] : config.params) validate(SpikeParams{lambda, beta, config.law});
    for (const auto& d : config.detections) validate(d);
}

double quantile(std::vector<double> values, double p) {
    if (values.empty()) throw std::invalid_argument("quantile of an empty sample");
    if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("quantile level must lie in [0, 1]");
    std::sort(values.begin(), values.end());
    const double h = (static_cast<double>(values.size()) - 1.0) * p;
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const std::size_t hi = std::min(lo + 1, values.size() - 1);
    return values[lo] + (h - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

StudyResult run_estimation_study(const StudyConfig& config, unsigned threads) {
    validate(config);
    const std::size_t modes = config.detections.size();
    const auto reps = static_cast<std::size_t>(config.replications);

    StudyResult result;
    for (std::size_t k = 0; k < config.params.size(); ++k) {
        const auto [lambda, beta] = config.params[k];
        ModelSpec model{config.continuous, SpikeParams{lambda, beta, config.law}};
        const std::uint64_t pair_seed = derive_seed(config.master_seed, k);

        // records[mode][rep]; each replication writes only its own slots.
        std::vector<std::vector<ReplicationRecord>> records(modes, std::vector<ReplicationRecord>(reps));
        parallel_for(config.replications, threads, [&](std::int64_t r) {
            const RandomSource rng(derive_seed(pair_seed, static_cast<std::uint64_t>(r)));
            const SimulatedPath path = simulate_spot(model, config.grid, rng);
            const BetaEstimate oracle = oracle_estimate_beta(path.observed, path.truth);
            for (std::size_t m = 0; m < modes; ++m) {
                const DetectionReport report = detect_jumps(path.observed, config.detections[m]);
                const BetaEstimate feasible = estimate_beta(path.observed, report);
                ReplicationRecord& rec = records[m][static_cast<std::size_t>(r)];
                rec.replication = r;
                rec.true_count = static_cast<Index>(path.truth.size());
                rec.detected = report.count;
                rec.lambda_hat = estimate_lambda(report, config.grid).lambda_hat;
                rec.beta_hat = feasible.beta_hat;
                rec.undefined = feasible.undefined;
                rec.floored = feasible.floored;
                if (!oracle.undefined) rec.oracle_beta = oracle.beta_hat;
                rec.exact_detection = detection_is_exact(report, path.truth, config.grid);
            }
        });

        for (std::size_t m = 0; m < modes; ++m) {
            std::vector<double> lambdas, betas;
            StudyRow row;
            row.lambda = lambda;
            row.beta = beta;
            row.mode = config.detections[m].mode;
            row.replications = config.replications;
            for (const ReplicationRecord& rec : records[m]) {
                lambdas.push_back(rec.lambda_hat);
                if (rec.undefined)
                    ++row.undefined_count;
                else
                    betas.push_back(rec.beta_hat);
                if (rec.floored) ++row.floored_count;
            }
            row.mean_lambda_hat = mean_of(lambdas);
            row.lambda_interval = {quantile(lambdas, 0.05), quantile(lambdas, 0.95)};
            row.mean_beta_hat = mean_of(betas);
            if (!betas.empty()) row.beta_interval = {quantile(betas, 0.05), quantile(betas, 0.95)};
            else row.beta_interval = {std::nan(""), std::nan("")};
            result.rows.push_back(row);
            result.records.push_back(std::move(records[m]));
        }
    }
    return result;
}

SpikeParams PricingStudyConfig::default_pricing_spikes() {
    return {35.0, 21042.533, JumpLaw::exponential_mixture({0.9, 0.1}, {1.0 / 100.0, 1.0 / 50.0}, {1, -1})};
}

std::vector<PricingRow> run_pricing_study(const PricingStudyConfig& config, unsigned threads) {
    const std::vector<double> exercises =
        config.exercise_times.empty() ? hourly_exercises(config.grid) : config.exercise_times;
    StripModel plain{config.factors, config.curve, std::nullopt};
    StripModel spiky{config.factors, config.curve, config.spikes};
    const auto without = price_strips_mc(plain, exercises, config.strikes, config.num_sims, config.seed, config.grid,
                                         threads);
    const auto with = price_strips_mc(spiky, exercises, config.strikes, config.num_sims, config.seed, config.grid,
                                      threads);
    std::vector<PricingRow> rows;
    for (std::size_t s = 0; s < config.strikes.size(); ++s)
        rows.push_back({config.strikes[s], without[s], with[s], with[s].estimate - without[s].estimate});
    return rows;
}

CsvTable study_table(const StudyResult& result) {
    CsvTable table;
    table.header = {"lambda",        "beta",        "mode",          "mean_lambda_hat", "lambda_q05",
                    "lambda_q95",    "mean_beta_hat", "beta_q05",    "beta_q95",        "replications",
                    "undefined",     "floored"};
    for (const StudyRow& row : result.rows)
        table.rows.push_back({format_double(row.lambda), format_double(row.beta), to_string(row.mode),
                              format_double(row.mean_lambda_hat), format_double(row.lambda_interval.first),
                              format_double(row.lambda_interval.second), format_double(row.mean_beta_hat),
                              format_double(row.beta_interval.first), format_double(row.beta_interval.second),
                              std::to_string(row.replications), std::to_string(row.undefined_count),
                              std::to_string(row.floored_count)});
    return table;
}

CsvTable replication_table(const StudyResult& result) {
    CsvTable table;
    table.header = {"lambda",   "beta",   "mode",      "replication", "true_count", "detected",
                    "lambda_hat", "beta_hat", "undefined", "floored",   "oracle_beta", "exact_detection"};
    for (std::size_t k = 0; k < result.rows.size(); ++k) {
        const StudyRow& row = result.rows[k];
        for (const ReplicationRecord& rec : result.records[k])
            table.rows.push_back({format_double(row.lambda), format_double(row.beta), to_string(row.mode),
                                  std::to_string(rec.replication), std::to_string(rec.true_count),
                                  std::to_string(rec.detected), format_double(rec.lambda_hat),
                                  format_double(rec.beta_hat), rec.undefined ? "1" : "0", rec.floored ? "1" : "0",
                                  rec.oracle_beta ? format_double(*rec.oracle_beta) : "",
                                  rec.exact_detection ? "1" : "0"});
    }
    return table;
}

CsvTable pricing_table(const std::vector<PricingRow>& rows) {
    CsvTable table;
    table.header = {"strike",       "setting",  "estimate", "ci_low", "ci_high", "std_error", "num_sims",
                    "spike_premium"};
    for (const PricingRow& row : rows) {
        for (const auto& [setting, price] : {std::pair{"without_spikes", &row.without_spikes},
                                             std::pair{"with_spikes", &row.with_spikes}})
            table.rows.push_back({format_double(row.strike), setting, format_double(price->estimate),
                                  format_double(price->ci95.first), format_double(price->ci95.second),
                                  format_double(price->std_error), std::to_string(price->num_sims),
                                  format_double(row.premium)});
    }
    return table;
}

std::string study_summary_json(const StudyResult& result) {
    json rows = json::array();
    for (const StudyRow& row : result.rows)
        rows.push_back({{"lambda", row.lambda},
                        {"beta", row.beta},
                        {"mode", to_string(row.mode)},
                        {"mean_lambda_hat", row.mean_lambda_hat},
                        {"lambda_q05_q95", interval_json(row.lambda_interval)},
                        {"mean_beta_hat", row.mean_beta_hat},
                        {"beta_q05_q95", interval_json(row.beta_interval)},
                        {"replications", row.replications},
                        {"undefined", row.undefined_count},
                        {"floored", row.floored_count}});
    return json{{"rows", rows}}.dump(2);
}

std::string pricing_summary_json(const std::vector<PricingRow>& rows) {
    json out = json::array();
    for (const PricingRow& row : rows)
        out.push_back({{"strike", row.strike},
                       {"without_spikes", price_json(row.without_spikes)},
                       {"with_spikes", price_json(row.with_spikes)},
                       {"spike_premium", row.premium}});
    return json{{"rows", out}}.dump(2);
}

void write_study_outputs(const StudyResult& result, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    write_csv(dir / "rows.csv", study_table(result));
    write_csv(dir / "replications.csv", replication_table(result));
    write_text(dir / "summary.json", study_summary_json(result));
}

void write_pricing_outputs(const std::vector<PricingRow>& rows, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    write_csv(dir / "pricing.csv", pricing_table(rows));
    write_text(dir / "summary.json", pricing_summary_json(rows));
}

}  // namespace spikelab
