#pragma once

#include <string_view>

namespace cordscan::log {

/// Reads CORDSCAN_LOG (trace, debug, info, warn, error, off) and configures
/// the process-wide logger. Safe to call more than once.
void init_from_env();

void set_level(std::string_view level);

void debug(std::string_view message);
void info(std::string_view message);
void warn(std::string_view message);
void error(std::string_view message);

}  // namespace cordscan::log
