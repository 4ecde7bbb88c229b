#include "dsched/checks.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace dsched {

LemmaAuditor::LemmaAuditor(Options options) : options_(options) {}

void LemmaAuditor::record(const char* check, int slot, int job,
                          double residual, long LemmaCounts::* counter) {
  counts_.*counter += 1;
  if (violations_.size() < options_.max_recorded)
    violations_.push_back(LemmaViolation{check, slot, job, residual});
}

void LemmaAuditor::begin_slot(const SchedulerState& state) {
  ++slot_;
  beta_before_.assign(state.all_beta().begin(), state.all_beta().end());
}

void LemmaAuditor::after_decision(const SchedulerState& state,
                                  const SlotDecision& decision,
                                  const RateRegion& region,
                                  std::span<const int> active) {
  // Complementary pair: alpha must track grad at the new cumulative service.
  for (int j : active) {
    const double res =
        std::abs(state.alpha(j) - state.utility(j).grad(state.served(j)));
    if (res > options_.pair_tol) record("pair", slot_, j, res, &LemmaCounts::pair);
  }

  // The allocation must attain the linear maximum at the solved duals.
  if (options_.check_attainment) {
    std::vector<double> weights(region.num_users(), 0.0);
    for (int j : active) {
      const double w = state.alpha(j) - beta_before_[j];
      weights[state.user(j)] = std::max(weights[state.user(j)], w);
    }
    const double best = region.linear_max(weights).objective;
    double attained = 0.0;
    for (const auto& [j, x] : decision.rates)
      attained += (state.alpha(j) - beta_before_[j]) * x;
    const double res = best - attained;
    if (res > options_.attain_rel_tol * (1.0 + std::abs(best)))
      record("attain", slot_, -1, res, &LemmaCounts::attain);
  }

  // Instantaneous utility dominates the priced allocation.
  {
    double inner = 0.0;
    for (const auto& [j, x] : decision.rates) inner += state.alpha(j) * x;
    const double res = inner - decision.reward_gain;
    if (res > options_.inner_tol) record("inner", slot_, -1, res, &LemmaCounts::inner);
  }

  // Region membership of the per-user aggregate.
  if (!decision.rates.empty() &&
      !region.contains(decision.user_rates, options_.feasibility_tol))
    record("membership", slot_, -1, 0.0, &LemmaCounts::membership);
}

void LemmaAuditor::after_beta(const SchedulerState& state,
                              const SlotDecision& decision) {
  const double growth = state.growth();
  double priced = 0.0;
  for (const auto& [j, x] : decision.rates) {
    const double beta = state.beta(j);
    if (beta < 0.0) record("nonneg", slot_, j, -beta, &LemmaCounts::nonneg);

    const double ratio = state.served(j) / state.size(j);
    const double floor = state.utility(j).grad(state.served(j)) *
                         (std::pow(growth, ratio) - 1.0) / (growth - 1.0);
    if (beta < floor - options_.beta_floor_tol)
      record("beta_floor", slot_, j, floor - beta, &LemmaCounts::beta_floor);

    const double budget = state.size(j) * (1.0 + state.f_max());
    if (state.served(j) > budget + options_.feasibility_tol)
      record("budget", slot_, j, state.served(j) - budget, &LemmaCounts::budget);

    priced += (beta - beta_before_[j]) * state.size(j);
  }
  const double allowance =
      decision.reward_gain * (1.0 + 1.0 / (growth - 1.0));
  if (priced > allowance + options_.growth_tol)
    record("growth", slot_, -1, priced - allowance, &LemmaCounts::growth);
}

void LemmaAuditor::end_run(const SchedulerState& state) {
  const double growth = state.growth();
  for (int j = 0; j < state.num_jobs(); ++j) {
    if (state.beta(j) < 0.0)
      record("nonneg", -1, j, -state.beta(j), &LemmaCounts::nonneg);
    if (state.alpha(j) < 0.0)
      record("nonneg", -1, j, -state.alpha(j), &LemmaCounts::nonneg);

    const double ratio = state.served(j) / state.size(j);
    const double floor = state.utility(j).grad(state.served(j)) *
                         (std::pow(growth, ratio) - 1.0) / (growth - 1.0);
    if (state.beta(j) < floor - options_.beta_floor_tol)
      record("beta_floor", -1, j, floor - state.beta(j),
             &LemmaCounts::beta_floor);

    const double budget = state.size(j) * (1.0 + state.f_max());
    if (state.served(j) > budget + options_.feasibility_tol)
      record("budget", -1, j, state.served(j) - budget, &LemmaCounts::budget);
  }
}

std::string LemmaAuditor::summary() const {
  std::ostringstream out;
  out << "pair=" << counts_.pair << " attain=" << counts_.attain
      << " beta_floor=" << counts_.beta_floor << " nonneg=" << counts_.nonneg
      << " membership=" << counts_.membership << " budget=" << counts_.budget
      << " inner=" << counts_.inner << " growth=" << counts_.growth;
  if (!violations_.empty()) {
    const auto& v = violations_.front();
    out << " first=" << v.check << "@slot" << v.slot << ",job" << v.job
        << ",residual=" << v.residual;
  }
  return out.str();
}

}  // namespace dsched
