#include "dsched/stochastic.hpp"

#include <algorithm>
#include <cmath>

namespace dsched {

VirtualQueue::VirtualQueue(std::span<const double> targets)
    : lengths_(targets.size(), 0.0), targets_(targets.begin(), targets.end()) {
  for (double d : targets_)
    if (d < 0.0) throw std::invalid_argument("VirtualQueue: negative target");
}

void VirtualQueue::update(std::span<const double> served) {
  if (served.size() != lengths_.size())
    throw std::invalid_argument("VirtualQueue::update: size mismatch");
  for (size_t n = 0; n < lengths_.size(); ++n)
    lengths_[n] = std::max(lengths_[n] + targets_[n] - served[n], 0.0);
}

namespace {

std::vector<double> served_by_user(int num_users, std::span<const Job> jobs,
                                   std::span<const double> totals) {
  std::vector<double> served(num_users, 0.0);
  for (size_t j = 0; j < jobs.size(); ++j) served[jobs[j].user] += totals[j];
  return served;
}

double raw_reward(std::span<const Job> jobs, std::span<const double> totals) {
  double reward = 0.0;
  for (size_t j = 0; j < jobs.size(); ++j)
    reward += jobs[j].utility.eval(totals[j]);
  return reward;
}

double drift_objective(double v, double reward, std::span<const double> queue,
                       std::span<const double> served) {
  double obj = v * reward;
  for (size_t n = 0; n < served.size(); ++n) obj += queue[n] * served[n];
  return obj;
}

}  // namespace

FrameResult lfdo_frame(const std::vector<Job>& jobs,
                       std::span<const RateRegion* const> regions,
                       VirtualQueue& queue, double v, double f_max,
                       OnlinePolicy engine, const SlotSolveOptions& solver,
                       LemmaAuditor* audit) {
  if (!(v > 0.0)) throw std::invalid_argument("lfdo_frame: V must be > 0");

  FrameResult result;
  result.queue_pre.assign(queue.lengths().begin(), queue.lengths().end());

  std::vector<BoostedUtility> boosted;
  boosted.reserve(jobs.size());
  for (const auto& job : jobs)
    boosted.emplace_back(job.utility, v, queue.length(job.user));
  std::vector<const Utility*> utilities;
  utilities.reserve(jobs.size());
  for (const auto& u : boosted) utilities.push_back(&u);

  RunOptions options;
  options.solver = solver;
  options.keep_decisions = false;
  const OnlineRun run =
      run_online(jobs, regions, utilities, f_max, engine, options, audit);

  result.served = served_by_user(queue.num_users(), jobs, run.state.all_served());
  result.reward = raw_reward(jobs, run.state.all_served());
  result.objective =
      drift_objective(v, result.reward, result.queue_pre, result.served);
  result.solver_gap = run.worst_gap;
  queue.update(result.served);
  result.queue_post.assign(queue.lengths().begin(), queue.lengths().end());
  return result;
}

FrameResult d_lookahead_frame(const std::vector<Job>& jobs,
                              std::span<const RateRegion* const> regions,
                              VirtualQueue& queue, double v,
                              const OfflineOptions& options) {
  if (!(v > 0.0)) throw std::invalid_argument("d_lookahead_frame: V must be > 0");

  FrameResult result;
  result.queue_pre.assign(queue.lengths().begin(), queue.lengths().end());

  std::vector<BoostedUtility> boosted;
  boosted.reserve(jobs.size());
  for (const auto& job : jobs)
    boosted.emplace_back(job.utility, v, queue.length(job.user));
  std::vector<const Utility*> utilities;
  utilities.reserve(jobs.size());
  for (const auto& u : boosted) utilities.push_back(&u);

  const OfflineSolution sol = offline_solve(jobs, regions, utilities, options);

  result.served = served_by_user(queue.num_users(), jobs, sol.totals);
  result.reward = raw_reward(jobs, sol.totals);
  result.objective =
      drift_objective(v, result.reward, result.queue_pre, result.served);
  result.solver_gap = sol.gap;
  queue.update(result.served);
  result.queue_post.assign(queue.lengths().begin(), queue.lengths().end());
  return result;
}

StabilityReport stability_report(std::span<const FrameResult> frames,
                                 std::span<const double> targets) {
  StabilityReport report;
  report.frames = static_cast<int>(frames.size());
  const int num_users = static_cast<int>(targets.size());
  report.queue_over_k.assign(num_users, 0.0);
  report.avg_served.assign(num_users, 0.0);
  if (frames.empty()) return report;

  std::vector<double> cumulative(num_users, 0.0);
  std::vector<double> queue(num_users, 0.0);
  double reward_sum = 0.0;
  for (size_t k = 0; k < frames.size(); ++k) {
    const auto& frame = frames[k];
    reward_sum += frame.reward;
    for (int n = 0; n < num_users; ++n) {
      cumulative[n] += frame.served[n];
      queue[n] = std::max(queue[n] + targets[n] - frame.served[n], 0.0);
      // Telescoped queue bound: Q_n[k]/k >= delta_n - mean served so far.
      const double mean = cumulative[n] / static_cast<double>(k + 1);
      const double residual = targets[n] - mean - queue[n] / static_cast<double>(k + 1);
      report.worst_violation_residual =
          std::max(report.worst_violation_residual, residual);
    }
  }
  const double k = static_cast<double>(frames.size());
  for (int n = 0; n < num_users; ++n) {
    report.queue_over_k[n] = queue[n] / k;
    report.avg_served[n] = cumulative[n] / k;
  }
  report.avg_reward = reward_sum / k;
  return report;
}

StochasticRun run_stochastic(const StochasticInstance& instance,
                             StochasticAlgo algo,
                             const StochasticOptions& options,
                             LemmaAuditor* audit) {
  StochasticRun out;
  out.frames.reserve(instance.frames.size());

  VirtualQueue queue(instance.targets);
  const std::vector<double> zero_queue(instance.num_users, 0.0);

  std::vector<const RateRegion*> regions(instance.frame_len);
  for (size_t k = 0; k < instance.frames.size(); ++k) {
    const Frame& frame = instance.frames[k];
    for (int t = 0; t < instance.frame_len; ++t)
      regions[t] = &instance.region_set[frame.region_ids[t]];

    FrameResult result;
    switch (algo) {
      case StochasticAlgo::kPlainDo:
      case StochasticAlgo::kPlainLightweight: {
        // Reward-maximizing frames: queues tracked for reporting only.
        VirtualQueue scratch(instance.targets);
        const auto engine = (algo == StochasticAlgo::kPlainDo)
                                ? OnlinePolicy::kFull
                                : OnlinePolicy::kLightweight;
        result = lfdo_frame(frame.jobs, regions, scratch, 1.0,
                            instance.f_max, engine, options.solver, audit);
        result.queue_pre.assign(queue.lengths().begin(), queue.lengths().end());
        result.objective = drift_objective(options.v, result.reward,
                                           result.queue_pre, result.served);
        queue.update(result.served);
        result.queue_post.assign(queue.lengths().begin(), queue.lengths().end());
        break;
      }
      case StochasticAlgo::kLfdo:
        if (options.benchmark_lookahead) {
          // Lookahead at the same queue state, without advancing it.
          VirtualQueue snapshot = queue;
          FrameResult ahead = d_lookahead_frame(frame.jobs, regions, snapshot,
                                                options.v, options.lookahead);
          out.lookahead_objective.push_back(ahead.objective);
          out.lookahead_gap.push_back(ahead.solver_gap);
        }
        result = lfdo_frame(frame.jobs, regions, queue, options.v,
                            instance.f_max, options.engine, options.solver,
                            audit);
        break;
      case StochasticAlgo::kDLookahead:
        result = d_lookahead_frame(frame.jobs, regions, queue, options.v,
                                   options.lookahead);
        break;
    }
    result.frame = static_cast<int>(k);
    out.total_reward += result.reward;
    out.frames.push_back(std::move(result));
  }

  out.report = stability_report(out.frames, instance.targets);
  out.final_queue.assign(queue.lengths().begin(), queue.lengths().end());
  return out;
}

}  // namespace dsched
