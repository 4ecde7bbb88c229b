#pragma once

#include <span>

#include "dsched/job.hpp"

namespace dsched {

struct OfflineSolution {
  // Per slot, the (job, rate) pairs with positive rate.
  std::vector<std::vector<std::pair<int, double>>> allocation;
  std::vector<double> totals;  // per job
  double objective = 0.0;      // achieved value
  double gap = 0.0;            // certified bound: optimum <= objective + gap
  bool converged = true;
  int iterations = 0;
};

struct OfflineOptions {
  double tol = 1e-3;  // stop when gap <= tol * (1 + |objective|)
  int max_outer = 1500;
  int max_inner = 4000;
  bool throw_on_failure = false;
};

// The prescient full-horizon optimum: conditional gradient on the concave
// objective, with each linear subproblem (budget-coupled across slots)
// solved by subgradient dual decomposition over per-slot vertex oracles.
// The reported gap is a valid optimality certificate built from the
// subproblem's best dual bound.
OfflineSolution offline_solve(std::span<const Job> jobs,
                              std::span<const RateRegion* const> regions,
                              std::span<const Utility* const> utilities,
                              const OfflineOptions& options);
OfflineSolution offline_solve(const Instance& instance,
                              const OfflineOptions& options);

// Exhaustive search over allocations on an h-grid, restricted to feasible
// points; independent of the conditional-gradient path. Refuses instances
// beyond tiny guards (horizon <= 4, users <= 2, jobs <= 3, vertices <= 3).
OfflineSolution brute_force_solve(std::span<const Job> jobs,
                                  std::span<const RateRegion* const> regions,
                                  double grid_step);
OfflineSolution brute_force_solve(const Instance& instance, double grid_step);

struct RatioReport {
  double vs_offline = 1.0;  // (offline objective + gap) / online reward
  double vs_dual = 1.0;     // dual objective / online reward
  bool infinite = false;
};

RatioReport competitive_ratio(double online_primal,
                              const OfflineSolution& offline,
                              double dual_value);

}  // namespace dsched
