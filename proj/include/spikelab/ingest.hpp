#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "spikelab/model.hpp"
#include "spikelab/simulate.hpp"

namespace spikelab {

enum class GapPolicy { Reject, ForwardFillMaxOne };
enum class DedupPolicy { Reject, KeepFirst };

GapPolicy parse_gap_policy(const std::string& text);
DedupPolicy parse_dedup_policy(const std::string& text);

enum class TimeFormat { Iso8601, EpochSeconds, Numeric };

const char* to_string(TimeFormat format);

struct IngestRules {
    std::string timestamp_column = "t";
    std::string price_column = "X";
    // Grid step in the units of the timestamp column (seconds for ISO-8601 and
    // epoch input). 0 infers it as the median spacing.
    double expected_step = 0.0;
    GapPolicy gap_policy = GapPolicy::Reject;
    DedupPolicy dedup_policy = DedupPolicy::Reject;
};

struct IngestReport {
    TimeFormat format = TimeFormat::Numeric;
    double step = 0.0;  // in timestamp units
    double span = 0.0;  // last minus first timestamp, in timestamp units
    Index rows_read = 0;
    std::vector<std::string> filled;            // timestamps inserted by forward fill
    std::vector<std::string> dropped_duplicates;
};

struct LoadedSeries {
    SampledPath path;  // horizon normalized to 1
    IngestReport report;
};

// Parses one timestamp: ISO-8601 date-times become epoch seconds, integers
// are epoch seconds, any other decimal is taken as is.
double parse_timestamp(const std::string& text, TimeFormat format);
TimeFormat detect_time_format(const std::string& text);

LoadedSeries load_spot_csv(const std::filesystem::path& path, const IngestRules& rules);

// t, X, Xc, Z with full precision; values read back bit for bit.
void write_path_csv(const SimulatedPath& path, const std::filesystem::path& file);
void write_truth_csv(const std::vector<JumpRecord>& truth, const std::filesystem::path& file);

}  // namespace spikelab
