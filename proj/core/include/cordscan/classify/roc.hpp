#pragma once

#include <span>

namespace cordscan::classify {

/// Area under the ROC curve as the Mann-Whitney probability that a
/// positive (label 1) outscores a negative, ties counting one half.
/// Throws SingleClassTest unless both labels occur.
double roc_auc(std::span<const double> scores, std::span<const int> labels);

}  // namespace cordscan::classify
