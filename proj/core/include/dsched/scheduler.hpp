#pragma once

#include <functional>
#include <span>
#include <vector>

#include "dsched/job.hpp"
#include "dsched/slot_solver.hpp"

namespace dsched {

// C = (1 + f)^(1/f); equals 2 at f = 1 and tends to e as f -> 0.
double growth_constant(double f_max);

struct SlotDecision {
  int slot = 0;
  std::vector<std::pair<int, double>> rates;  // (job, rate), rate > 0 only
  std::vector<double> user_rates;
  double reward_gain = 0.0;  // Delta P of the slot
  int solver_iterations = 0;
  double solver_gap = 0.0;
};

class SchedulerState;

SlotDecision do_step(SchedulerState& state, std::span<const int> active,
                     const RateRegion& region, const SlotSolveOptions& options);
SlotDecision lightweight_do_step(SchedulerState& state,
                                 std::span<const int> active,
                                 const RateRegion& region);
void beta_update(SchedulerState& state, const SlotDecision& decision);

// Per-job bookkeeping of one online run: cumulative service S and the dual
// pair (alpha, beta). Deliberately holds no deadlines, so the scheduling
// steps cannot see them.
class SchedulerState {
 public:
  SchedulerState(std::span<const Job> jobs,
                 std::span<const Utility* const> utilities,  // empty: job's own
                 double f_max);

  int num_jobs() const { return static_cast<int>(served_.size()); }
  double served(int j) const { return served_[j]; }
  double alpha(int j) const { return alpha_[j]; }
  double beta(int j) const { return beta_[j]; }
  double size(int j) const { return size_[j]; }
  int user(int j) const { return user_[j]; }
  const Utility& utility(int j) const { return *utility_[j]; }
  double f_max() const { return f_max_; }
  double growth() const { return growth_; }

  std::span<const double> all_served() const { return served_; }
  std::span<const double> all_alpha() const { return alpha_; }
  std::span<const double> all_beta() const { return beta_; }

  // Advances S by the decision's rates, refreshes alpha = grad(S), and
  // fills the decision's reward gain.
  void apply(SlotDecision& decision);

  // Fault injection for the validation suite's negative control; never
  // called by the algorithms.
  void debug_scale_beta(double factor) {
    for (double& b : beta_) b *= factor;
  }

 private:
  friend void beta_update(SchedulerState&, const SlotDecision&);

  std::vector<double> served_;
  std::vector<double> alpha_;
  std::vector<double> beta_;
  std::vector<double> size_;
  std::vector<int> user_;
  std::vector<const Utility*> utility_;
  double f_max_;
  double growth_;
};

// do_step: the joint primal-dual step. Maximizes
//   sum_j f_j(S_j + x_j) - beta_j x_j
// over the region (the saddle problem with alpha eliminated through the
// conjugate pairing), advances S, and sets alpha_j = grad_j(S_j). Per-job
// service this slot is capped at Y_j (1 + F_max) - S_j.
//
// lightweight_do_step: the split variant. Allocates by the linear oracle at
// the stale duals (alpha_{t-1} - beta_{t-1}), each user's rate going to its
// best active job (ties to the lowest id), then refreshes alpha.
//
// beta_update: geometric dual ascent of beta for the slot's allocation;
// betas of jobs without service are unchanged. Call after the step advanced
// S and alpha.

// P = sum_j f_j(S_j).
double compute_primal(const SchedulerState& state);

// D = sum_t sigma_t(A_t alpha_T - beta_T) + beta_T . Y - sum_j f*_j(alpha_Tj),
// evaluated with the final duals; sigma_t reduces to the vertex oracle with
// per-user weights max(0, max over jobs active at t of alpha_j - beta_j).
double compute_dual(const SchedulerState& state, std::span<const Job> jobs,
                    std::span<const RateRegion* const> regions);

enum class OnlinePolicy { kFull, kLightweight };

struct RunOptions {
  SlotSolveOptions solver;
  bool keep_decisions = true;
  // Called once per slot after the beta update, e.g. to stream trace rows.
  std::function<void(const SchedulerState&, const SlotDecision&)> slot_sink;
};

class LemmaAuditor;  // checks.hpp

struct OnlineRun {
  SchedulerState state;
  std::vector<SlotDecision> decisions;
  double primal = 0.0;
  double dual = 0.0;
  double growth = 0.0;
  double f_max = 0.0;
  double bound = 0.0;  // 3 + 1/(C-1)
  int solver_iterations = 0;
  double worst_gap = 0.0;
};

OnlineRun run_online(std::span<const Job> jobs,
                     std::span<const RateRegion* const> regions,
                     std::span<const Utility* const> utilities, double f_max,
                     OnlinePolicy policy, const RunOptions& options,
                     LemmaAuditor* audit = nullptr);

OnlineRun run_online(const Instance& instance, OnlinePolicy policy,
                     const RunOptions& options, LemmaAuditor* audit = nullptr);

// All rates multiplied by (1 - f_max), restoring strict budget feasibility
// from the Y_j (1 + F_max) slack.
struct ScaledRun {
  std::vector<SlotDecision> decisions;
  std::vector<double> totals;  // per job
  double reward = 0.0;
};

ScaledRun feasibility_scale(const std::vector<SlotDecision>& decisions,
                            const SchedulerState& state);

}  // namespace dsched
