#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <optional>
#include <utility>
#include <vector>

#include "spikelab/csv.hpp"
#include "spikelab/detect.hpp"
#include "spikelab/model.hpp"
#include "spikelab/pricing.hpp"

namespace spikelab {

struct StudyConfig {
    std::vector<std::pair<double, double>> params;  // (lambda, beta)
    Index replications = 500;
    GridSpec grid{10000, 1.0};
    std::vector<DetectionConfig> detections;  // one entry per mode, all run on the same paths
    JumpLaw law = study_jump_law();
    ContinuousSpec continuous = ExpOUSpec{};
    std::uint64_t master_seed = 0;
};

// The four (lambda, beta) pairs of the simulation study crossed with the two modes.
StudyConfig default_study_config();

void validate(const StudyConfig& config);

struct ReplicationRecord {
    Index replication = 0;
    Index true_count = 0;
    Index detected = 0;
    double lambda_hat = 0.0;
    double beta_hat = 0.0;
    bool undefined = false;
    bool floored = false;
    std::optional<double> oracle_beta;
    bool exact_detection = false;  // flagged intervals are exactly the intervals of lone true jumps
};

struct StudyRow {
    double lambda = 0.0;
    double beta = 0.0;
    DetectionMode mode = DetectionMode::SignFiltered;
    double mean_lambda_hat = 0.0;
    std::pair<double, double> lambda_interval{0.0, 0.0};  // 5% and 95% quantiles
    double mean_beta_hat = 0.0;                           // over replications where beta_hat is defined
    std::pair<double, double> beta_interval{0.0, 0.0};
    Index replications = 0;
    Index undefined_count = 0;
    Index floored_count = 0;
};

struct StudyResult {
    std::vector<StudyRow> rows;
    std::vector<std::vector<ReplicationRecord>> records;  // parallel to rows
};

// Linear interpolation between order statistics (type 7). p in [0, 1].
double quantile(std::vector<double> values, double p);

// Replication r of pair k is simulated from derive_seed(derive_seed(master_seed, k), r).
StudyResult run_estimation_study(const StudyConfig& config, unsigned threads = 1);

struct PricingStudyConfig {
    TwoFactorParams factors{12.56, 1.03, 0.25, -0.11};
    ForwardCurve curve = ForwardCurve::flat(40.0);
    SpikeParams spikes = default_pricing_spikes();
    std::vector<double> strikes{100.0, 200.0, 300.0};
    std::vector<double> exercise_times;  // empty: every grid time after 0
    std::int64_t num_sims = 10000;
    GridSpec grid{8760, 1.0};
    std::uint64_t seed = 0;

    // Upward-tailed law at the scale of hourly market spikes, intensity and
    // reversion of the order estimated on hourly spot data.
    static SpikeParams default_pricing_spikes();
};

struct PricingRow {
    double strike = 0.0;
    PriceWithCI without_spikes;
    PriceWithCI with_spikes;
    double premium = 0.0;  // with - without
};

// Both settings reuse the same factor paths.
std::vector<PricingRow> run_pricing_study(const PricingStudyConfig& config, unsigned threads = 1);

CsvTable study_table(const StudyResult& result);
CsvTable replication_table(const StudyResult& result);
CsvTable pricing_table(const std::vector<PricingRow>& rows);

std::string study_summary_json(const StudyResult& result);
std::string pricing_summary_json(const std::vector<PricingRow>& rows);

// Writes rows.csv, replications.csv and summary.json into `dir`.
void write_study_outputs(const StudyResult& result, const std::filesystem::path& dir);
// Writes pricing.csv and summary.json into `dir`.
void write_pricing_outputs(const std::vector<PricingRow>& rows, const std::filesystem::path& dir);

}  // namespace spikelab
