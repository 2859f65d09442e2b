#include "cordscan/stats/welch.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "cordscan/error.hpp"
#include "cordscan/log.hpp"
#include "cordscan/stats/distributions.hpp"

namespace cordscan::stats {
namespace {

struct Moments {
  double mean = 0.0;
  double var = 0.0;  // n - 1 denominator
};

Moments moments(std::span<const double> x, const char* name) {
  if (x.size() < 2) {
    throw Error(ErrorCode::InsufficientSamples,
                std::string("sample ") + name + " has " + std::to_string(x.size()) + " values, need at least 2");
  }
  double sum = 0.0;
  for (double v : x) {
    if (!std::isfinite(v)) throw Error(ErrorCode::InsufficientSamples, std::string("sample ") + name + " has a non-finite value");
    sum += v;
  }
  Moments m;
  m.mean = sum / static_cast<double>(x.size());
  double ss = 0.0;
  double drift = 0.0;
  for (double v : x) {
    ss += (v - m.mean) * (v - m.mean);
    drift += v - m.mean;
  }
  const double n = static_cast<double>(x.size());
  m.var = (ss - drift * drift / n) / (n - 1.0);
  if (m.var < 0.0) m.var = 0.0;
  return m;
}

}  // namespace

WelchResult welch(std::span<const double> a, std::span<const double> b) {
  const Moments ma = moments(a, "a");
  const Moments mb = moments(b, "b");
  WelchResult r;
  r.n_a = a.size();
  r.n_b = b.size();
  r.mean_a = ma.mean;
  r.mean_b = mb.mean;
  r.sd_a = std::sqrt(ma.var);
  r.sd_b = std::sqrt(mb.var);

  const double na = static_cast<double>(r.n_a);
  const double nb = static_cast<double>(r.n_b);
  const double va = ma.var / na;
  const double vb = mb.var / nb;
  const double diff = ma.mean - mb.mean;
  if (va + vb == 0.0) {
    r.degenerate = true;
    r.df = na + nb - 2.0;
    if (diff == 0.0) {
      r.t = 0.0;
      r.p = 1.0;
    } else {
      r.t = std::copysign(std::numeric_limits<double>::infinity(), diff);
      r.p = 0.0;
    }
    return r;
  }
  const double se2 = va + vb;
  r.t = diff / std::sqrt(se2);
  r.df = se2 * se2 / (va * va / (na - 1.0) + vb * vb / (nb - 1.0));
  r.p = std::clamp(t_two_sided(r.t, r.df), 0.0, 1.0);
  return r;
}

std::string ms_label(double thr) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "MS(%g%%)", thr * 100.0);
  return buf;
}

std::vector<GroupComparison> compare_groups(const regions::CohortTable& table, std::span<const double> thresholds,
                                            std::span<const Metric> metrics) {
  using regions::RowClass;
  const auto healthy = regions::select_rows(table, RowClass::V);
  std::vector<std::pair<std::string, std::vector<std::size_t>>> groups;
  groups.emplace_back("NAWM", regions::select_rows(table, RowClass::Nawm));
  for (double thr : thresholds) groups.emplace_back(ms_label(thr), regions::select_ms_rows(table, thr));

  auto values = [&](const std::vector<std::size_t>& idx, Metric m) {
    std::vector<double> out;
    out.reserve(idx.size());
    for (std::size_t i : idx) out.push_back(table.rows[i].metric(m));
    return out;
  };

  std::vector<GroupComparison> out;
  for (Metric m : metrics) {
    const auto v = values(healthy, m);
    for (const auto& [label, idx] : groups) {
      try {
        out.push_back({label, m, welch(v, values(idx, m))});
      } catch (const Error& e) {
        if (e.code() != ErrorCode::InsufficientSamples) throw;
        log::warn("skipping V vs " + label + " for " + std::string(display_name(m)) + ": " + e.what());
      }
    }
  }
  return out;
}

}  // namespace cordscan::stats
