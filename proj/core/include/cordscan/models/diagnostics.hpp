#pragma once

namespace cordscan::models {

struct FitDiagnostics {
  double rss = 0.0;
  double initial_rss = 0.0;
  int iterations = 0;
  bool converged = false;
  bool degenerate = false;  // fiber direction not identifiable
};

}  // namespace cordscan::models
