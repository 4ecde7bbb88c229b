#pragma once

#include <span>

#include "dsched/checks.hpp"
#include "dsched/offline.hpp"
#include "dsched/scheduler.hpp"
#include "dsched/workload.hpp"

namespace dsched {

// Per-user timely-throughput debt:
//   Q_n <- max(Q_n + delta_n - served_n, 0)
// once per frame. Starts at zero and never goes negative.
class VirtualQueue {
 public:
  explicit VirtualQueue(std::span<const double> targets);

  int num_users() const { return static_cast<int>(lengths_.size()); }
  double length(int n) const { return lengths_[n]; }
  double target(int n) const { return targets_[n]; }
  std::span<const double> lengths() const { return lengths_; }
  std::span<const double> targets() const { return targets_; }

  void update(std::span<const double> served);

 private:
  std::vector<double> lengths_;
  std::vector<double> targets_;
};

struct FrameResult {
  int frame = 0;
  double reward = 0.0;            // raw utility earned in the frame
  std::vector<double> served;     // b_n per user
  std::vector<double> queue_pre;   // Q at the frame start
  std::vector<double> queue_post;  // Q after the frame's update
  double objective = 0.0;  // V * reward + sum_n Q_pre_n * served_n
  double solver_gap = 0.0;
};

struct StochasticOptions {
  double v = 1.0;  // reward weight V > 0
  OnlinePolicy engine = OnlinePolicy::kFull;
  SlotSolveOptions solver;
  OfflineOptions lookahead;
  // Also solve each frame's lookahead program (at the same queue state) and
  // record its objective next to the online one.
  bool benchmark_lookahead = false;
};

// One frame of the queue-weighted primal-dual scheduler: runs the online
// engine with per-job rewards V f_j(x) + Q_{U(j)} x, fresh dual state, then
// updates the queue with the realized per-user service.
FrameResult lfdo_frame(const std::vector<Job>& jobs,
                       std::span<const RateRegion* const> regions,
                       VirtualQueue& queue, double v, double f_max,
                       OnlinePolicy engine, const SlotSolveOptions& solver,
                       LemmaAuditor* audit = nullptr);

// Non-causal benchmark: maximizes V sum_j f_j + sum_n Q_n b_n over the whole
// frame through the offline solver, then updates the queue.
FrameResult d_lookahead_frame(const std::vector<Job>& jobs,
                              std::span<const RateRegion* const> regions,
                              VirtualQueue& queue, double v,
                              const OfflineOptions& options);

struct StabilityReport {
  int frames = 0;
  std::vector<double> queue_over_k;  // Q_n[K] / K
  std::vector<double> avg_served;    // mean b_n
  double avg_reward = 0.0;
  // max over frames of delta_n - mean served - Q_n[k]/k; <= 0 when the
  // telescoped queue inequality holds.
  double worst_violation_residual = 0.0;
};

StabilityReport stability_report(std::span<const FrameResult> frames,
                                 std::span<const double> targets);

enum class StochasticAlgo { kPlainDo, kPlainLightweight, kLfdo, kDLookahead };

struct StochasticRun {
  std::vector<FrameResult> frames;
  StabilityReport report;
  double total_reward = 0.0;
  std::vector<double> final_queue;
  // Filled when benchmark_lookahead is set: per frame, the lookahead
  // objective and its certificate at the online run's queue state.
  std::vector<double> lookahead_objective;
  std::vector<double> lookahead_gap;
};

StochasticRun run_stochastic(const StochasticInstance& instance,
                             StochasticAlgo algo,
                             const StochasticOptions& options,
                             LemmaAuditor* audit = nullptr);

}  // namespace dsched
