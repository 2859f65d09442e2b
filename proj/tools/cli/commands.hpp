#pragma once

#include <functional>

#include <CLI11.hpp>

namespace cordscan::cli {

/// Set by the parsed subcommand's callback; run after parsing succeeds.
using Action = std::function<int()>;

void add_phantom_command(CLI::App& root, Action& action);
void add_fit_command(CLI::App& root, Action& action);
void add_aggregate_command(CLI::App& root, Action& action);
void add_stats_command(CLI::App& root, Action& action);
void add_classify_command(CLI::App& root, Action& action);

}  // namespace cordscan::cli
