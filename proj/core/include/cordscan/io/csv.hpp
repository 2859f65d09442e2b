#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace cordscan::io {

/// Comma-separated table with a header row, '.' decimal point and LF line
/// endings. Fields never contain commas, so no quoting is performed.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  /// Column index by name; throws InvalidArgument when absent.
  std::size_t column(std::string_view name) const;
  bool has_column(std::string_view name) const noexcept;
};

/// Throws IoFailure if unreadable, LengthMismatch on ragged rows.
CsvTable read_csv(const std::filesystem::path& path);

void write_csv(const CsvTable& table, const std::filesystem::path& path);

/// Shortest round-trippable decimal form ("nan" for NaN).
std::string format_number(double value);

/// Strict parse of a whole field; throws NonNumericToken.
double parse_number(std::string_view field);

}  // namespace cordscan::io
