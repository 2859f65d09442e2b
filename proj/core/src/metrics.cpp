#include "cordscan/metrics.hpp"

#include <cctype>

#include "cordscan/error.hpp"

namespace cordscan {

std::string_view column_name(Metric m) noexcept {
  switch (m) {
    case Metric::Fww: return "fww";
    case Metric::StickAd: return "stick_ad";
    case Metric::Ad: return "ad";
    case Metric::Fa: return "fa";
    case Metric::Md: return "md";
    case Metric::Rd: return "rd";
  }
  return "";
}

std::string_view display_name(Metric m) noexcept {
  switch (m) {
    case Metric::Fww: return "FWW";
    case Metric::StickAd: return "STICK_AD";
    case Metric::Ad: return "AD";
    case Metric::Fa: return "FA";
    case Metric::Md: return "MD";
    case Metric::Rd: return "RD";
  }
  return "";
}

Metric parse_metric(std::string_view name) {
  std::string key;
  for (char c : name) {
    if (std::isspace(static_cast<unsigned char>(c))) continue;
    key += c == '-' ? '_' : static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  }
  for (Metric m : kAllMetrics) {
    if (key == column_name(m)) return m;
  }
  throw Error(ErrorCode::InvalidArgument, "unknown metric '" + std::string(name) + "'");
}

std::vector<Metric> parse_metric_list(std::string_view text) {
  std::vector<Metric> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t comma = text.find(',', start);
    const auto token = text.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start);
    out.push_back(parse_metric(token));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  for (std::size_t i = 0; i < out.size(); ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      if (out[i] == out[j]) {
        throw Error(ErrorCode::InvalidArgument, "metric " + std::string(display_name(out[i])) + " listed twice");
      }
    }
  }
  return out;
}

std::string join_metrics(const std::vector<Metric>& metrics, std::string_view separator) {
  std::string out;
  for (std::size_t i = 0; i < metrics.size(); ++i) {
    if (i) out += separator;
    out += display_name(metrics[i]);
  }
  return out;
}

}  // namespace cordscan
