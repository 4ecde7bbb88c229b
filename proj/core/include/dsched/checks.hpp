#pragma once

#include <span>
#include <string>
#include <vector>

#include "dsched/scheduler.hpp"

namespace dsched {

struct LemmaViolation {
  std::string check;
  int slot = -1;
  int job = -1;
  double residual = 0.0;
};

struct LemmaCounts {
  long pair = 0;        // alpha tracks grad(S)
  long attain = 0;      // allocation attains the dual inner maximum
  long beta_floor = 0;  // geometric lower bound on beta
  long nonneg = 0;      // duals stay non-negative
  long membership = 0;  // per-user rates inside the region
  long budget = 0;      // served <= Y (1 + F_max)
  long inner = 0;       // <alpha, x> <= Delta P
  long growth = 0;      // beta increments priced by Delta P

  long total() const {
    return pair + attain + beta_floor + nonneg + membership + budget + inner +
           growth;
  }
};

// Per-slot verification of the primal-dual run invariants. Hook it into
// run_online; violations carry the slot, job and residual.
class LemmaAuditor {
 public:
  struct Options {
    bool check_attainment = true;  // only meaningful for the full step
    double attain_rel_tol = 1e-6;
    double pair_tol = 1e-7;
    double beta_floor_tol = 1e-9;
    double feasibility_tol = 1e-9;
    double inner_tol = 1e-9;
    double growth_tol = 1e-9;
    std::size_t max_recorded = 64;
  };

  LemmaAuditor() : LemmaAuditor(Options()) {}
  explicit LemmaAuditor(Options options);

  void begin_slot(const SchedulerState& state);
  void after_decision(const SchedulerState& state, const SlotDecision& decision,
                      const RateRegion& region, std::span<const int> active);
  void after_beta(const SchedulerState& state, const SlotDecision& decision);
  void end_run(const SchedulerState& state);

  bool clean() const { return counts_.total() == 0; }
  const LemmaCounts& counts() const { return counts_; }
  const std::vector<LemmaViolation>& violations() const { return violations_; }
  std::string summary() const;

 private:
  void record(const char* check, int slot, int job, double residual,
              long LemmaCounts::* counter);

  Options options_;
  std::vector<double> beta_before_;
  LemmaCounts counts_;
  std::vector<LemmaViolation> violations_;
  int slot_ = -1;
};

}  // namespace dsched
