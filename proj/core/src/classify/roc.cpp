#include "cordscan/classify/roc.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "cordscan/error.hpp"

namespace cordscan::classify {

double roc_auc(std::span<const double> scores, std::span<const int> labels) {
  if (scores.size() != labels.size()) throw Error(ErrorCode::DimensionMismatch, "scores and labels differ in length");
  const std::size_t n = scores.size();
  for (std::size_t i = 0; i < n; ++i) {
    if (std::isnan(scores[i])) throw Error(ErrorCode::InvalidArgument, "score is NaN");
    if (labels[i] != 0 && labels[i] != 1) throw Error(ErrorCode::InvalidArgument, "labels must be 0 or 1");
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

  // Sum of positive midranks (1-based).
  double rank_sum = 0.0;
  double n_pos = 0.0;
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j < n && scores[order[j]] == scores[order[i]]) ++j;
    const double midrank = 0.5 * static_cast<double>(i + 1 + j);
    for (std::size_t k = i; k < j; ++k) {
      if (labels[order[k]] == 1) {
        rank_sum += midrank;
        n_pos += 1.0;
      }
    }
    i = j;
  }
  const double n_neg = static_cast<double>(n) - n_pos;
  if (n_pos == 0.0 || n_neg == 0.0) throw Error(ErrorCode::SingleClassTest, "test labels contain a single class");
  return (rank_sum - n_pos * (n_pos + 1.0) / 2.0) / (n_pos * n_neg);
}

}  // namespace cordscan::classify
