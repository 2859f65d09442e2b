#include "cordscan/log.hpp"

#include <cstdlib>
#include <string>

#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

namespace cordscan {
namespace log {
namespace {

std::shared_ptr<spdlog::logger> logger() {
  static std::shared_ptr<spdlog::logger> instance = [] {
    auto l = spdlog::stderr_color_mt("cordscan");
    l->set_pattern("[%H:%M:%S.%e] [%^%l%$] %v");
    l->set_level(spdlog::level::info);
    return l;
  }();
  return instance;
}

}  // namespace

void set_level(std::string_view level) {
  logger()->set_level(spdlog::level::from_str(std::string(level)));
}

void init_from_env() {
  if (const char* env = std::getenv("CORDSCAN_LOG"); env != nullptr && *env != '\0') {
    set_level(env);
  } else {
    logger();
  }
}

void debug(std::string_view message) { logger()->debug(message); }
void info(std::string_view message) { logger()->info(message); }
void warn(std::string_view message) { logger()->warn(message); }
void error(std::string_view message) { logger()->error(message); }

}  // namespace log
}  // namespace cordscan
