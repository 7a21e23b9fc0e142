#include "spikelab/ingest.hpp"

#include <Eigen/Core>

#include <algorithm>
#include <cctype>
#include <charconv>
#include <chrono>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "spikelab/csv.hpp"

namespace spikelab {

namespace {

double parse_number(const std::string& text, const std::string& what) {
    double value = 0.0;
    const char* begin = text.data();
    const char* end = text.data() + text.size();
    while (begin < end && *begin == ' ') ++begin;
    while (end > begin && end[-1] == ' ') --end;
    if (begin < end && *begin == '+') ++begin;
    const auto result = std::from_chars(begin, end, value);
    if (result.ec != std::errc() || result.ptr != end || begin == end)
        throw std::invalid_argument("cannot parse " + what + " '" + text + "'");
    return value;
}

int digits(const std::string& text, std::size_t pos, std::size_t count) {
    if (pos + count > text.size()) throw std::invalid_argument("truncated timestamp '" + text + "'");
    int value = 0;
    for (std::size_t i = pos; i < pos + count; ++i) {
        if (text[i] < '0' || text[i] > '9') throw std::invalid_argument("bad timestamp '" + text + "'");
        value = value * 10 + (text[i] - '0');
    }
    return value;
}

double parse_iso(const std::string& text) {
    using namespace std::chrono;
    const int y = digits(text, 0, 4), mo = digits(text, 5, 2), d = digits(text, 8, 2);
    if (text[4] != '-' || text[7] != '-') throw std::invalid_argument("bad timestamp '" + text + "'");
    const year_month_day date{year{y}, month{static_cast<unsigned>(mo)}, day{static_cast<unsigned>(d)}};
    if (!date.ok()) throw std::invalid_argument("invalid date in '" + text + "'");
    double seconds = static_cast<double>(sys_days{date}.time_since_epoch().count()) * 86400.0;

    std::size_t pos = 10;
    if (pos < text.size() && (text[pos] == 'T' || text[pos] == ' ')) {
        const int h = digits(text, pos + 1, 2), mi = digits(text, pos + 4, 2);
        if (text[pos + 3] != ':' || h > 23 || mi > 59) throw std::invalid_argument("bad time in '" + text + "'");
        seconds += h * 3600.0 + mi * 60.0;
        pos += 6;
        if (pos < text.size() && text[pos] == ':') {
            const int s = digits(text, pos + 1, 2);
            if (s > 60) throw std::invalid_argument("bad seconds in '" + text + "'");
            seconds += s;
            pos += 3;
            if (pos < text.size() && text[pos] == '.') {
                std::size_t end = pos + 1;
                while (end < text.size() && std::isdigit(static_cast<unsigned char>(text[end]))) ++end;
                seconds += parse_number("0" + text.substr(pos, end - pos), "fractional seconds");
                pos = end;
            }
        }
    }
    if (pos < text.size()) {
        if (text[pos] == 'Z' && pos + 1 == text.size()) return seconds;
        if ((text[pos] == '+' || text[pos] == '-') && pos + 6 == text.size() && text[pos + 3] == ':') {
            const int offset = digits(text, pos + 1, 2) * 3600 + digits(text, pos + 4, 2) * 60;
            return seconds - (text[pos] == '+' ? offset : -offset);
        }
        throw std::invalid_argument("unrecognized timestamp suffix in '" + text + "'");
    }
    return seconds;
}

struct Row {
    double time;
    double price;
    std::string stamp;
};

double median_spacing(const std::vector<Row>& rows) {
    std::vector<double> gaps;
    for (std::size_t i = 1; i < rows.size(); ++i)
        if (rows[i].time > rows[i - 1].time) gaps.push_back(rows[i].time - rows[i - 1].time);
    if (gaps.empty()) throw std::invalid_argument("cannot infer the time step");
    std::nth_element(gaps.begin(), gaps.begin() + static_cast<std::ptrdiff_t>(gaps.size() / 2), gaps.end());
    return gaps[gaps.size() / 2];
}

}  // namespace

GapPolicy parse_gap_policy(const std::string& text) {
    if (text == "reject") return GapPolicy::Reject;
    if (text == "forward_fill_max_1") return GapPolicy::ForwardFillMaxOne;
    throw std::invalid_argument("unknown gap policy '" + text + "' (reject | forward_fill_max_1)");
}

DedupPolicy parse_dedup_policy(const std::string& text) {
    if (text == "reject") return DedupPolicy::Reject;
    if (text == "keep_first") return DedupPolicy::KeepFirst;
    throw std::invalid_argument("unknown dedup policy '" + text + "' (reject | keep_first)");
}

const char* to_string(TimeFormat format) {
    switch (format) {
        case TimeFormat::Iso8601: return "iso8601";
        case TimeFormat::EpochSeconds: return "epoch_seconds";
        case TimeFormat::Numeric: return "numeric";
    }
    return "numeric";
}

TimeFormat detect_time_format(const std::string& text) {
    if (text.size() >= 10 && text[4] == '-' && text[7] == '-') return TimeFormat::Iso8601;
    const std::size_t start = (!text.empty() && (text[0] == '-' || text[0] == '+')) ? 1 : 0;
    const bool integral = text.size() > start &&
                          std::all_of(text.begin() + static_cast<std::ptrdiff_t>(start), text.end(),
                                      [](char c) { return c >= '0' && c <= '9'; });
    return integral ? TimeFormat::EpochSeconds : TimeFormat::Numeric;
}

double parse_timestamp(const std::string& text, TimeFormat format) {
    switch (format) {
        case TimeFormat::Iso8601: return parse_iso(text);
        case TimeFormat::EpochSeconds:
        case TimeFormat::Numeric: return parse_number(text, "timestamp");
    }
    return 0.0;
}

LoadedSeries load_spot_csv(const std::filesystem::path& path, const IngestRules& rules) {
    if (!(rules.expected_step >= 0.0)) throw std::invalid_argument("expected step must be positive");
    const CsvTable table = read_csv(path);
    const std::size_t time_col = table.column(rules.timestamp_column);
    const std::size_t price_col = table.column(rules.price_column);
    if (table.rows.size() < 2) throw std::invalid_argument("need at least two observations");

    IngestReport report;
    report.rows_read = static_cast<Index>(table.rows.size());
    // Numeric columns with any fractional entry are read as plain numbers throughout.
    report.format = detect_time_format(table.rows.front()[time_col]);
    if (report.format == TimeFormat::EpochSeconds)
        for (const auto& r : table.rows)
            if (detect_time_format(r[time_col]) == TimeFormat::Numeric) report.format = TimeFormat::Numeric;

    std::vector<Row> rows;
    rows.reserve(table.rows.size());
    for (const auto& r : table.rows) {
        const double price = parse_number(r[price_col], "price");
        if (!std::isfinite(price)) throw std::invalid_argument("non-finite price at " + r[time_col]);
        rows.push_back({parse_timestamp(r[time_col], report.format), price, r[time_col]});
    }

    if (rules.dedup_policy == DedupPolicy::Reject) {
        for (std::size_t i = 1; i < rows.size(); ++i) {
            if (rows[i].time < rows[i - 1].time)
                throw std::invalid_argument("timestamps not increasing at " + rows[i].stamp);
            if (rows[i].time == rows[i - 1].time) throw std::invalid_argument("duplicate timestamp " + rows[i].stamp);
        }
    } else {
        std::stable_sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) { return a.time < b.time; });
        std::vector<Row> unique;
        for (Row& r : rows) {
            if (!unique.empty() && unique.back().time == r.time)
                report.dropped_duplicates.push_back(r.stamp);
            else
                unique.push_back(std::move(r));
        }
        rows = std::move(unique);
        if (rows.size() < 2) throw std::invalid_argument("need at least two distinct timestamps");
    }

    const double step = rules.expected_step > 0.0 ? rules.expected_step : median_spacing(rows);
    report.step = step;
    std::vector<double> values{rows.front().price};
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const double ratio = (rows[i].time - rows[i - 1].time) / step;
        const double steps = std::round(ratio);
        if (std::abs(ratio - steps) > 1e-6 * std::max(1.0, steps) || steps < 1.0)
            throw std::invalid_argument("irregular spacing at " + rows[i].stamp);
        if (steps == 2.0 && rules.gap_policy == GapPolicy::ForwardFillMaxOne) {
            values.push_back(rows[i - 1].price);
            report.filled.push_back(format_double(rows[i - 1].time + step));
        } else if (steps > 1.0) {
            throw std::invalid_argument("gap of " + format_double(steps - 1.0) + " missing step(s) before " +
                                        rows[i].stamp);
        }
        values.push_back(rows[i].price);
    }
    report.span = rows.back().time - rows.front().time;

    const auto n = static_cast<Index>(values.size()) - 1;
    Eigen::VectorXd v = Eigen::Map<const Eigen::VectorXd>(values.data(), static_cast<Index>(values.size()));
    return {SampledPath(GridSpec(n, 1.0), std::move(v)), std::move(report)};
}

void write_path_csv(const SimulatedPath& path, const std::filesystem::path& file) {
    CsvTable table;
    table.header = {"t", "X", "Xc", "Z"};
    const GridSpec& grid = path.observed.grid();
    for (Index i = 0; i <= grid.n(); ++i)
        table.rows.push_back({format_double(grid.time(i)), format_double(path.observed.values()[i]),
                              format_double(path.continuous.values()[i]), format_double(path.spike.values()[i])});
    write_csv(file, table);
}

void write_truth_csv(const std::vector<JumpRecord>& truth, const std::filesystem::path& file) {
    CsvTable table;
    table.header = {"t_jump", "size"};
    for (const JumpRecord& r : truth) table.rows.push_back({format_double(r.time), format_double(r.size)});
    write_csv(file, table);
}

}  // namespace spikelab
