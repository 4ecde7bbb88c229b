#include "dsched/scheduler.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "dsched/checks.hpp"

namespace dsched {

double growth_constant(double f_max) {
  if (f_max < 1e-8) return std::numbers::e;
  return std::pow(1.0 + f_max, 1.0 / f_max);
}

SchedulerState::SchedulerState(std::span<const Job> jobs,
                               std::span<const Utility* const> utilities,
                               double f_max)
    : f_max_(f_max), growth_(growth_constant(f_max)) {
  if (!utilities.empty() && utilities.size() != jobs.size())
    throw std::invalid_argument("SchedulerState: utilities size mismatch");
  const int n = static_cast<int>(jobs.size());
  served_.assign(n, 0.0);
  alpha_.resize(n);
  beta_.assign(n, 0.0);
  size_.resize(n);
  user_.resize(n);
  utility_.resize(n);
  for (int j = 0; j < n; ++j) {
    size_[j] = jobs[j].size;
    user_[j] = jobs[j].user;
    utility_[j] = utilities.empty() ? &jobs[j].utility : utilities[j];
    alpha_[j] = utility_[j]->grad(0.0);
  }
}

void SchedulerState::apply(SlotDecision& decision) {
  double gain = 0.0;
  for (const auto& [j, x] : decision.rates) {
    const double before = served_[j];
    served_[j] += x;
    gain += utility_[j]->eval(served_[j]) - utility_[j]->eval(before);
    alpha_[j] = utility_[j]->grad(served_[j]);
  }
  decision.reward_gain = gain;
}

SlotDecision do_step(SchedulerState& state, std::span<const int> active,
                     const RateRegion& region,
                     const SlotSolveOptions& options) {
  SlotDecision decision;
  decision.user_rates.assign(region.num_users(), 0.0);

  std::vector<SlotJob> slot_jobs;
  slot_jobs.reserve(active.size());
  for (int j : active) {
    const double cap = state.size(j) * (1.0 + state.f_max()) - state.served(j);
    if (cap <= 0.0) continue;
    slot_jobs.push_back(SlotJob{j, state.user(j), &state.utility(j),
                                state.served(j), state.beta(j), cap});
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

SlotDecision lightweight_do_step(SchedulerState& state,
                                 std::span<const int> active,
                                 const RateRegion& region) {
  SlotDecision decision;
  const int num_users = region.num_users();
  decision.user_rates.assign(num_users, 0.0);

  std::vector<double> weights(num_users, 0.0);
  std::vector<int> best_job(num_users, -1);
  for (int j : active) {
    const double w = state.alpha(j) - state.beta(j);
    const int n = state.user(j);
    if (best_job[n] < 0 || w > weights[n]) {  // ties keep the lowest id
      best_job[n] = j;
      weights[n] = w;
    }
  }
  for (int n = 0; n < num_users; ++n) weights[n] = std::max(weights[n], 0.0);

  const auto lm = region.linear_max(weights);
  for (int n = 0; n < num_users; ++n) {
    if (weights[n] <= 0.0 || lm.rates[n] <= 0.0) continue;
    const int j = best_job[n];
    const double cap =
        state.size(j) * (1.0 + state.f_max()) - state.served(j);
    const double rate = std::min(lm.rates[n], std::max(cap, 0.0));
    if (rate > 0.0) {
      decision.rates.emplace_back(j, rate);
      decision.user_rates[n] = rate;
    }
  }
  state.apply(decision);
  return decision;
}

void beta_update(SchedulerState& state, const SlotDecision& decision) {
  const double growth = state.growth_;
  for (const auto& [j, x] : decision.rates) {
    const double s_new = state.served_[j];
    const double s_old = s_new - x;
    const double g_new = state.utility_[j]->grad(s_new);
    const double g_old = state.utility_[j]->grad(std::max(s_old, 0.0));
    const double size = state.size_[j];
    state.beta_[j] = (g_new / g_old) * (1.0 + x / size) * state.beta_[j] +
                     g_new * x / ((growth - 1.0) * size);
  }
}

double compute_primal(const SchedulerState& state) {
  double p = 0.0;
  for (int j = 0; j < state.num_jobs(); ++j)
    p += state.utility(j).eval(state.served(j));
  return p;
}

double compute_dual(const SchedulerState& state, std::span<const Job> jobs,
                    std::span<const RateRegion* const> regions) {
  double support_sum = 0.0;
  const int horizon = static_cast<int>(regions.size());
  for (int t = 0; t < horizon; ++t) {
    const int num_users = regions[t]->num_users();
    std::vector<double> weights(num_users, 0.0);
    for (size_t j = 0; j < jobs.size(); ++j) {
      if (!jobs[j].active_at(t)) continue;
      const double w = state.alpha(j) - state.beta(j);
      weights[jobs[j].user] = std::max(weights[jobs[j].user], w);
    }
    support_sum += regions[t]->linear_max(weights).objective;
  }

  double beta_budget = 0.0;
  double conjugates = 0.0;
  for (int j = 0; j < state.num_jobs(); ++j) {
    beta_budget += state.beta(j) * state.size(j);
    conjugates += state.utility(j).conjugate(state.alpha(j));
  }
  return support_sum + beta_budget - conjugates;
}

OnlineRun run_online(std::span<const Job> jobs,
                     std::span<const RateRegion* const> regions,
                     std::span<const Utility* const> utilities, double f_max,
                     OnlinePolicy policy, const RunOptions& options,
                     LemmaAuditor* audit) {
  SchedulerState state(jobs, utilities, f_max);
  std::vector<SlotDecision> decisions;
  const int horizon = static_cast<int>(regions.size());
  if (options.keep_decisions) decisions.reserve(horizon);

  int iterations = 0;
  double worst_gap = 0.0;
  std::vector<int> active;
  for (int t = 0; t < horizon; ++t) {
    active.clear();
    for (size_t j = 0; j < jobs.size(); ++j)
      if (jobs[j].active_at(t)) active.push_back(static_cast<int>(j));

    if (audit) audit->begin_slot(state);
    SlotDecision decision =
        (policy == OnlinePolicy::kFull)
            ? do_step(state, active, *regions[t], options.solver)
            : lightweight_do_step(state, active, *regions[t]);
    decision.slot = t;
    iterations += decision.solver_iterations;
    worst_gap = std::max(worst_gap, decision.solver_gap);
    if (audit) audit->after_decision(state, decision, *regions[t], active);
    beta_update(state, decision);
    if (audit) audit->after_beta(state, decision);
    if (options.slot_sink) options.slot_sink(state, decision);
    if (options.keep_decisions) decisions.push_back(std::move(decision));
  }
  if (audit) audit->end_run(state);

  OnlineRun run{std::move(state), std::move(decisions)};
  run.primal = compute_primal(run.state);
  run.dual = compute_dual(run.state, jobs, regions);
  run.growth = run.state.growth();
  run.f_max = run.state.f_max();
  run.bound = 3.0 + 1.0 / (run.growth - 1.0);
  run.solver_iterations = iterations;
  run.worst_gap = worst_gap;
  return run;
}

OnlineRun run_online(const Instance& instance, OnlinePolicy policy,
                     const RunOptions& options, LemmaAuditor* audit) {
  std::vector<const RateRegion*> regions;
  regions.reserve(instance.regions.size());
  for (const auto& r : instance.regions) regions.push_back(&r);
  return run_online(instance.jobs, regions, {}, instance.f_max, policy,
                    options, audit);
}

ScaledRun feasibility_scale(const std::vector<SlotDecision>& decisions,
                            const SchedulerState& state) {
  const double factor = 1.0 - state.f_max();
  ScaledRun out;
  out.decisions = decisions;
  out.totals.assign(state.num_jobs(), 0.0);
  for (auto& decision : out.decisions) {
    for (auto& [j, x] : decision.rates) {
      x *= factor;
      out.totals[j] += x;
    }
    for (double& r : decision.user_rates) r *= factor;
  }
  for (int j = 0; j < state.num_jobs(); ++j)
    out.reward += state.utility(j).eval(out.totals[j]);
  return out;
}

}  // namespace dsched
