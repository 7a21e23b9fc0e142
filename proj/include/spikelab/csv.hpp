#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace spikelab {

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    // Position of a header name; throws std::invalid_argument when absent.
    std::size_t column(const std::string& name) const;
};

// RFC-4180: quoted fields may hold commas, doubled quotes and line breaks.
// The first record is the header; every row must match its width.
CsvTable parse_csv(const std::string& text);
CsvTable read_csv(const std::filesystem::path& path);

std::string csv_field(const std::string& value);
void write_csv(std::ostream& out, const CsvTable& table);
void write_csv(const std::filesystem::path& path, const CsvTable& table);

// Shortest form that parses back to the same double.
std::string format_double(double value);

}  // namespace spikelab
