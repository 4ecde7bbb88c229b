#include "dsched/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace dsched {

namespace {

// Ranked cap-and-spill: walk each user's job ranking, serving up to the
// remaining size, until the user's rate is used up.
SlotDecision ranked_allocation(
    SchedulerState& state, const RateRegion& region,
    const std::vector<std::vector<int>>& ranking,  // per user, best first
    std::span<const double> weights) {
  SlotDecision decision;
  const int num_users = region.num_users();
  decision.user_rates.assign(num_users, 0.0);

  const auto lm = region.linear_max(weights);
  for (int n = 0; n < num_users; ++n) {
    double budget = (weights[n] > 0.0) ? lm.rates[n] : 0.0;
    for (int j : ranking[n]) {
      if (budget <= 0.0) break;
      const double remaining = state.size(j) - state.served(j);
      if (remaining <= 0.0) continue;
      const double rate = std::min(budget, remaining);
      decision.rates.emplace_back(j, rate);
      decision.user_rates[n] += rate;
      budget -= rate;
    }
  }
  state.apply(decision);
  return decision;
}

}  // namespace

SlotDecision edd_step(SchedulerState& state, std::span<const Job> jobs,
                      std::span<const int> active, const RateRegion& region) {
  const int num_users = region.num_users();
  std::vector<std::vector<int>> ranking(num_users);
  std::vector<double> weights(num_users, 0.0);
  for (int j : active) {
    if (state.served(j) >= state.size(j)) continue;
    ranking[state.user(j)].push_back(j);
    weights[state.user(j)] = 1.0;
  }
  for (auto& list : ranking)
    std::sort(list.begin(), list.end(), [&](int a, int b) {
      if (jobs[a].deadline != jobs[b].deadline)
        return jobs[a].deadline < jobs[b].deadline;
      return a < b;
    });
  return ranked_allocation(state, region, ranking, weights);
}

SlotDecision greedy_step(SchedulerState& state, std::span<const int> active,
                         const RateRegion& region) {
  const int num_users = region.num_users();
  std::vector<std::vector<int>> ranking(num_users);
  std::vector<double> weights(num_users, 0.0);
  for (int j : active) {
    if (state.served(j) >= state.size(j)) continue;
    const int n = state.user(j);
    ranking[n].push_back(j);
    weights[n] = std::max(weights[n], state.utility(j).grad_at_zero());
  }
  for (auto& list : ranking)
    std::sort(list.begin(), list.end(), [&](int a, int b) {
      const double ga = state.utility(a).grad_at_zero();
      const double gb = state.utility(b).grad_at_zero();
      if (ga != gb) return ga > gb;
      return a < b;
    });
  return ranked_allocation(state, region, ranking, weights);
}

SlotDecision primal_step(SchedulerState& state, std::span<const int> active,
                         const RateRegion& region,
                         const SlotSolveOptions& options) {
  SlotDecision decision;
  decision.user_rates.assign(region.num_users(), 0.0);

  std::vector<SlotJob> slot_jobs;
  slot_jobs.reserve(active.size());
  for (int j : active) {
    const double cap = state.size(j) - state.served(j);
    if (cap <= 0.0) continue;
    slot_jobs.push_back(SlotJob{j, state.user(j), &state.utility(j),
                                state.served(j), 0.0, cap});
  }
  if (!slot_jobs.empty()) {
    const auto sol = solve_slot(slot_jobs, region, options);
    decision.solver_iterations = sol.iterations;
    decision.solver_gap = sol.gap;
    for (size_t i = 0; i < slot_jobs.size(); ++i) {
      if (sol.rates[i] > 0.0) {
        decision.rates.emplace_back(slot_jobs[i].index, sol.rates[i]);
        decision.user_rates[slot_jobs[i].user] += sol.rates[i];
      }
    }
  }
  state.apply(decision);
  return decision;
}

OnlineRun run_baseline(const Instance& instance, Baseline baseline,
                       const RunOptions& options) {
  std::vector<const RateRegion*> regions;
  regions.reserve(instance.regions.size());
  for (const auto& r : instance.regions) regions.push_back(&r);

  SchedulerState state(instance.jobs, {}, instance.f_max);
  std::vector<SlotDecision> decisions;
  if (options.keep_decisions) decisions.reserve(instance.horizon);

  int iterations = 0;
  double worst_gap = 0.0;
  std::vector<int> active;
  for (int t = 0; t < instance.horizon; ++t) {
    active.clear();
    for (size_t j = 0; j < instance.jobs.size(); ++j)
      if (instance.jobs[j].active_at(t)) active.push_back(static_cast<int>(j));

    SlotDecision decision;
    switch (baseline) {
      case Baseline::kEdd:
        decision = edd_step(state, instance.jobs, active, *regions[t]);
        break;
      case Baseline::kGreedy:
        decision = greedy_step(state, active, *regions[t]);
        break;
      case Baseline::kPrimal:
        decision = primal_step(state, active, *regions[t], options.solver);
        break;
    }
    decision.slot = t;
    iterations += decision.solver_iterations;
    worst_gap = std::max(worst_gap, decision.solver_gap);
    if (options.slot_sink) options.slot_sink(state, decision);
    if (options.keep_decisions) decisions.push_back(std::move(decision));
  }

  OnlineRun run{std::move(state), std::move(decisions)};
  run.primal = compute_primal(run.state);
  run.dual = compute_dual(run.state, instance.jobs, regions);
  run.growth = run.state.growth();
  run.f_max = run.state.f_max();
  run.bound = 3.0 + 1.0 / (run.growth - 1.0);
  run.solver_iterations = iterations;
  run.worst_gap = worst_gap;
  return run;
}

}  // namespace dsched
