#pragma once

#include <span>
#include <vector>

#include "dsched/rng.hpp"

namespace dsched {

// Feasible per-user rates for one slot: the downward closure of the convex
// hull of a finite vertex set,
//   { x >= 0 : x <= sum_i lambda_i v_i, lambda >= 0, sum lambda <= 1 }.
// Closed, bounded, convex; always contains the origin.
class RateRegion {
 public:
  RateRegion(int num_users, std::vector<std::vector<double>> vertices);

  int num_users() const { return num_users_; }
  const std::vector<std::vector<double>>& vertices() const { return vertices_; }

  struct LinearMax {
    std::vector<double> rates;  // argmax, one rate per user
    double objective = 0.0;
  };

  // Maximum of sum_n max(coeffs[n], 0) * x_n over the region. The argmax is
  // the best vertex with non-positively weighted coordinates dropped to 0
  // (free disposal).
  LinearMax linear_max(std::span<const double> coeffs) const;

  // Exact membership test: is there lambda >= 0 with sum lambda <= 1 and
  // x <= V^T lambda + tol componentwise? Decided by a small feasibility
  // program over the lambda simplex.
  bool contains(std::span<const double> x, double tol) const;

  // Largest vertex coordinate for one user.
  double max_rate(int user) const;

 private:
  int num_users_;
  std::vector<std::vector<double>> vertices_;
};

// m vertices with coordinate n drawn i.i.d. uniform on [0, rate_caps[n]].
RateRegion sample_region(int num_users, int num_vertices,
                         std::span<const double> rate_caps, Rng& rng);

}  // namespace dsched
