#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace cordscan {

/// The six per-level diffusion metrics, in cohort-table column order.
enum class Metric { Fww, StickAd, Ad, Fa, Md, Rd };

inline constexpr std::size_t kMetricCount = 6;
inline constexpr std::array<Metric, kMetricCount> kAllMetrics = {Metric::Fww, Metric::StickAd, Metric::Ad,
                                                                 Metric::Fa,  Metric::Md,      Metric::Rd};

using MetricValues = std::array<double, kMetricCount>;

constexpr std::size_t index(Metric m) noexcept { return static_cast<std::size_t>(m); }

/// Lower-case name used for CSV columns and fitted map files (fww, stick_ad, ...).
std::string_view column_name(Metric m) noexcept;

/// Upper-case name used in combo strings and reports (FWW, STICK_AD, ...).
std::string_view display_name(Metric m) noexcept;

/// Case-insensitive; '-' is accepted for '_' ("Stick-AD"). Throws InvalidArgument.
Metric parse_metric(std::string_view name);

/// Comma-separated metric list, e.g. "FWW,STICK_AD,MD,RD".
std::vector<Metric> parse_metric_list(std::string_view text);
std::string join_metrics(const std::vector<Metric>& metrics, std::string_view separator = "&");

}  // namespace cordscan
