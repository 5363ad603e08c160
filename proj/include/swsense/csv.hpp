#pragma once

// Minimal comma-separated reader/writer for the numeric artifacts the
// simulator exchanges. No quoting support; fields never contain commas.

#include <cstddef>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace swsense {

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    /// Throws ConfigError when the column is missing.
    [[nodiscard]] std::size_t column_index(std::string_view name) const;
    [[nodiscard]] double number(std::size_t row, std::size_t col) const;
};

CsvTable parse_csv(std::string_view text);
CsvTable read_csv(const std::string& path);

/// Formats a double with enough digits to round-trip.
std::string format_number(double v);

void write_csv_row(std::ostream& os, const std::vector<std::string>& fields);

}  // namespace swsense
