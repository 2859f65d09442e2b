#include "common.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "cordscan/error.hpp"
#include "cordscan/io/csv.hpp"
#include "cordscan/io/labels.hpp"
#include "cordscan/parallel.hpp"

namespace cordscan::cli {
namespace {

[[noreturn]] void bad(const std::string& message) { throw Error(ErrorCode::InvalidArgument, message); }

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, sep)) {
    item.erase(0, item.find_first_not_of(" \t"));
    item.erase(item.find_last_not_of(" \t") + 1);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

int parse_level(const std::string& token) {
  std::string t = token;
  if (!t.empty() && (t[0] == 'C' || t[0] == 'c')) t.erase(0, 1);
  const double v = io::parse_number(t);
  if (v != std::floor(v) || v < io::kMinLevel || v > io::kMaxLevel) bad("level '" + token + "' is not in 1..7");
  return static_cast<int>(v);
}

}  // namespace

void require_file(const std::filesystem::path& path, const std::string& what) {
  std::error_code ec;
  if (!std::filesystem::is_regular_file(path, ec)) {
    throw Error(ErrorCode::IoFailure, what + " '" + path.string() + "' does not exist or is not a file");
  }
}

void ensure_directory(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec || !std::filesystem::is_directory(dir)) {
    throw Error(ErrorCode::IoFailure, "cannot create directory '" + dir.string() + "'");
  }
}

std::vector<int> parse_levels(const std::string& text) {
  std::vector<int> out;
  for (const auto& part : split(text, ',')) {
    const auto dash = part.find('-');
    if (dash == std::string::npos) {
      out.push_back(parse_level(part));
      continue;
    }
    const int a = parse_level(part.substr(0, dash));
    const int b = parse_level(part.substr(dash + 1));
    if (b < a) bad("level range '" + part + "' is reversed");
    for (int l = a; l <= b; ++l) out.push_back(l);
  }
  if (out.empty()) bad("no levels given");
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<double> parse_thresholds(const std::string& text) {
  std::vector<double> out;
  if (text.find(':') != std::string::npos) {
    const auto parts = split(text, ':');
    if (parts.size() != 3) bad("threshold range must be start:stop:step");
    const double start = io::parse_number(parts[0]);
    const double stop = io::parse_number(parts[1]);
    const double step = io::parse_number(parts[2]);
    if (!(step > 0.0) || stop < start) bad("threshold range '" + text + "' is empty");
    const auto n = static_cast<long>(std::floor((stop - start) / step + 1e-9));
    // start + i * step, rounded to 12 decimals so 0.02:0.20:0.02 gives 0.06, not 0.060000000000000005.
    for (long i = 0; i <= n; ++i) out.push_back(std::round((start + static_cast<double>(i) * step) * 1e12) / 1e12);
  } else {
    for (const auto& part : split(text, ',')) out.push_back(io::parse_number(part));
  }
  if (out.empty()) bad("no thresholds given");
  for (double t : out) {
    if (!(t >= 0.0 && t <= 1.0)) bad("threshold " + io::format_number(t) + " is outside [0, 1]");
  }
  return out;
}

std::filesystem::path sidecar_path(const std::filesystem::path& output) {
  std::error_code ec;
  if (std::filesystem::is_directory(output, ec)) return output / "metadata.json";
  return std::filesystem::path(output.string() + ".json");
}

void write_sidecar(const std::filesystem::path& output, const std::string& command, const nlohmann::json& params,
                   const std::uint64_t* seed) {
  nlohmann::json meta;
  meta["tool"] = "cordscan";
  meta["version"] = version();
  meta["command"] = command;
  if (seed) meta["seed"] = *seed;
  meta["params"] = params;
  const auto path = sidecar_path(output);
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::IoFailure, "cannot write '" + path.string() + "'");
  out << meta.dump(2) << '\n';
}

void echo_seed(std::uint64_t seed) { std::printf("seed: %llu\n", static_cast<unsigned long long>(seed)); }

void add_threads_option(CLI::App& app, unsigned& threads) {
  threads = default_thread_count();
  app.add_option("--threads", threads, "worker threads (results do not depend on it)")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
}

std::string version() { return CORDSCAN_VERSION; }

}  // namespace cordscan::cli
