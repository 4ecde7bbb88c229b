#pragma once

#include <vector>

namespace dsched::detail {

struct SimplexResult {
  std::vector<double> solution;
  double objective = 0.0;
  bool optimal = false;
};

// Maximizes c . z subject to A z <= b, z >= 0, with b >= 0 so the all-slack
// basis starts feasible. Dense tableau with Bland's rule; intended for the
// per-slot oracle sizes (tens of rows and columns).
SimplexResult simplex_max(const std::vector<double>& c,
                          const std::vector<std::vector<double>>& a,
                          const std::vector<double>& b);

}  // namespace dsched::detail
