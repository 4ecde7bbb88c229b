#pragma once

#include <span>
#include <stdexcept>
#include <vector>

#include "dsched/rate_region.hpp"
#include "dsched/utility.hpp"

namespace dsched {

// A schedulable job as the per-slot solver sees it: no deadline, only the
// state needed to price one slot of service.
struct SlotJob {
  int index = 0;  // caller-side job index, echoed back
  int user = 0;
  const Utility* utility = nullptr;
  double served = 0.0;  // cumulative service before this slot
  double beta = 0.0;    // dual price per unit of service
  double cap = 0.0;     // max extra service this slot; must be > 0
};

struct SlotSolveOptions {
  double gap_tol = 1e-7;  // stop when gap <= gap_tol * (1 + |objective|)
  int max_iterations = 4000;
  bool throw_on_failure = true;
};

struct SlotSolveResult {
  std::vector<double> rates;  // aligned with the input jobs span
  double objective = 0.0;     // achieved Phi, normalized so Phi(0) = 0
  double gap = 0.0;           // final first-order gap surrogate
  int iterations = 0;
  bool converged = true;
};

class SolverError : public std::runtime_error {
 public:
  SolverError(const std::string& what, double residual)
      : std::runtime_error(what), residual_(residual) {}
  double residual() const { return residual_; }

 private:
  double residual_;
};

// Maximizes  Phi(x) = sum_j [u_j(served_j + x_j) - u_j(served_j)]
//                     - beta_j * x_j
// over allocations whose per-user sums lie in the region, with each x_j
// additionally capped at cap_j. Pairwise conditional gradient: the linear
// subproblem is the region's vertex oracle with per-user weights taken as
// the best positive job gradient, and caps enter by flattening u beyond
// served + cap. Returned rates are clipped to the caps.
SlotSolveResult solve_slot(std::span<const SlotJob> jobs,
                           const RateRegion& region,
                           const SlotSolveOptions& options);

}  // namespace dsched
