#include "cordscan/io/csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>

#include "cordscan/error.hpp"

namespace cordscan::io {
namespace {

std::vector<std::string> split(std::string_view line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      out.emplace_back(line.substr(start));
      break;
    }
    out.emplace_back(line.substr(start, comma - start));
    start = comma + 1;
  }
  return out;
}

}  // namespace

std::size_t CsvTable::column(std::string_view name) const {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return i;
  }
  throw Error(ErrorCode::InvalidArgument, "missing CSV column '" + std::string(name) + "'");
}

bool CsvTable::has_column(std::string_view name) const noexcept {
  for (const auto& h : header) {
    if (h == name) return true;
  }
  return false;
}

CsvTable read_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoFailure, "cannot open " + path.string());
  CsvTable table;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto fields = split(line);
    if (table.header.empty()) {
      table.header = std::move(fields);
      continue;
    }
    if (fields.size() != table.header.size()) {
      throw Error(ErrorCode::LengthMismatch, path.string() + ":" + std::to_string(line_no) + ": expected " +
                                                 std::to_string(table.header.size()) + " fields, got " +
                                                 std::to_string(fields.size()));
    }
    table.rows.push_back(std::move(fields));
  }
  if (table.header.empty()) throw Error(ErrorCode::IoFailure, path.string() + " has no header row");
  return table;
}

void write_csv(const CsvTable& table, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoFailure, "cannot open " + path.string() + " for writing");
  auto write_row = [&](const std::vector<std::string>& row) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out << ',';
      out << row[i];
    }
    out << '\n';
  };
  write_row(table.header);
  for (const auto& row : table.rows) write_row(row);
  if (!out) throw Error(ErrorCode::IoFailure, "write failed for " + path.string());
}

std::string format_number(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  if (ec != std::errc()) return "nan";
  return std::string(buf, ptr);
}

double parse_number(std::string_view field) {
  if (field == "nan" || field == "NaN" || field == "NA") return std::nan("");
  const char* first = field.data();
  const char* last = field.data() + field.size();
  if (first != last && *first == '+') ++first;
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last || first == last) {
    throw Error(ErrorCode::NonNumericToken, "'" + std::string(field) + "' is not a number");
  }
  return value;
}

}  // namespace cordscan::io
