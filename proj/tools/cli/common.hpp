#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

namespace cordscan::cli {

enum ExitCode : int { kOk = 0, kDegenerate = 1, kUsage = 2 };

/// Throws InvalidArgument naming `what` unless the file exists.
void require_file(const std::filesystem::path& path, const std::string& what);

/// Creates the directory (and parents); throws IoFailure.
void ensure_directory(const std::filesystem::path& dir);

/// "2-4", "1,3,5", "2-4,6": sorted unique labels in 1..7.
std::vector<int> parse_levels(const std::string& text);

/// "0.05,0.10" or a range "0.02:0.20:0.02" (inclusive end).
std::vector<double> parse_thresholds(const std::string& text);

/// Provenance written next to an output: {"tool", "version", "command",
/// "seed" (when given), "params"}.
void write_sidecar(const std::filesystem::path& output, const std::string& command, const nlohmann::json& params,
                   const std::uint64_t* seed = nullptr);

/// Sidecar path for an output file or directory: "<output>.json", or
/// "<dir>/metadata.json" for directories.
std::filesystem::path sidecar_path(const std::filesystem::path& output);

void echo_seed(std::uint64_t seed);

/// Registers --threads (default: all cores) on a subcommand.
void add_threads_option(CLI::App& app, unsigned& threads);

std::string version();

}  // namespace cordscan::cli
