#include "dsched/offline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "dsched/slot_solver.hpp"

namespace dsched {

namespace {

// Sparse allocation over the horizon with its per-job totals.
struct Atom {
  std::vector<std::vector<std::pair<int, double>>> rates;  // per slot
  std::vector<double> totals;
  double weight = 0.0;
};

// max sum_j coeff_j * sum_t x_tj over per-slot regions and job budgets,
// solved to a certificate by subgradient ascent on the budget multipliers.
// Returns a feasible allocation (averaged iterates, scaled back inside the
// budgets) and the best dual bound on the true maximum.
struct InnerLp {
  Atom atom;        // feasible allocation, weight unset
  double value = 0.0;    // coeff . totals of the atom
  double bound = 0.0;    // >= LP optimum
  int iterations = 0;
};

InnerLp solve_budget_lp(std::span<const Job> jobs,
                        std::span<const RateRegion* const> regions,
                        std::span<const double> coeff,
                        std::vector<double>& multipliers,  // warm started
                        double step_scale, double target_gap, int max_iter) {
  const int horizon = static_cast<int>(regions.size());
  const int num_jobs = static_cast<int>(jobs.size());

  std::vector<std::vector<int>> active(horizon);
  for (int t = 0; t < horizon; ++t)
    for (int j = 0; j < num_jobs; ++j)
      if (jobs[j].active_at(t)) active[t].push_back(j);

  std::vector<double> avg_totals(num_jobs, 0.0);
  std::vector<double> iter_totals(num_jobs);
  std::vector<double> weights;
  std::vector<int> best_job;

  InnerLp out;
  out.bound = std::numeric_limits<double>::infinity();

  // Dense running average of the per-slot rates keyed by (slot, job in
  // active[t]) position.
  std::vector<std::vector<double>> avg(horizon);
  for (int t = 0; t < horizon; ++t) avg[t].assign(active[t].size(), 0.0);

  double value = 0.0;
  double value_floor = 0.0;  // best repaired value seen, drives the steps
  int it = 1;
  for (; it <= max_iter; ++it) {
    std::fill(iter_totals.begin(), iter_totals.end(), 0.0);
    double dual = 0.0;
    for (int t = 0; t < horizon; ++t) {
      const int num_users = regions[t]->num_users();
      weights.assign(num_users, 0.0);
      best_job.assign(num_users, -1);
      for (int j : active[t]) {
        const double w = coeff[j] - multipliers[j];
        const int n = jobs[j].user;
        if (best_job[n] < 0 || w > weights[n]) {
          best_job[n] = j;
          weights[n] = w;
        }
      }
      for (int n = 0; n < num_users; ++n)
        weights[n] = std::max(weights[n], 0.0);
      const auto lm = regions[t]->linear_max(weights);
      dual += lm.objective;

      auto& slot_avg = avg[t];
      for (size_t i = 0; i < active[t].size(); ++i) {
        const int j = active[t][i];
        const int n = jobs[j].user;
        const double rate =
            (best_job[n] == j && weights[n] > 0.0) ? lm.rates[n] : 0.0;
        iter_totals[j] += rate;
        slot_avg[i] += (rate - slot_avg[i]) / it;
      }
    }
    for (int j = 0; j < num_jobs; ++j) {
      dual += multipliers[j] * jobs[j].size;
      avg_totals[j] += (iter_totals[j] - avg_totals[j]) / it;
    }
    out.bound = std::min(out.bound, dual);

    // Value of the averaged allocation after scaling each job inside its
    // budget.
    value = 0.0;
    for (int j = 0; j < num_jobs; ++j)
      value += coeff[j] * std::min(avg_totals[j], jobs[j].size);
    value_floor = std::max(value_floor, value);
    if (out.bound - value <= target_gap && it >= 8) break;

    // Polyak-type step toward the best primal value seen, with a decaying
    // fallback while the floor is still uninformative.
    double norm2 = 0.0;
    for (int j = 0; j < num_jobs; ++j) {
      const double g = iter_totals[j] - jobs[j].size;
      norm2 += g * g;
    }
    if (norm2 <= 1e-18) break;  // all budgets tight: multipliers optimal
    const double fallback = step_scale / std::sqrt(static_cast<double>(it));
    double step = (dual - value_floor) / norm2;
    if (!(step > 0.0)) step = fallback;
    step = std::min(step, fallback * 10.0);
    for (int j = 0; j < num_jobs; ++j)
      multipliers[j] = std::max(
          0.0, multipliers[j] + step * (iter_totals[j] - jobs[j].size));
  }
  out.iterations = std::min(it, max_iter);

  // Materialize the repaired averaged allocation.
  out.atom.totals.assign(num_jobs, 0.0);
  out.atom.rates.assign(horizon, {});
  std::vector<double> scale(num_jobs, 1.0);
  for (int j = 0; j < num_jobs; ++j)
    if (avg_totals[j] > jobs[j].size) scale[j] = jobs[j].size / avg_totals[j];
  for (int t = 0; t < horizon; ++t) {
    for (size_t i = 0; i < active[t].size(); ++i) {
      const int j = active[t][i];
      const double rate = avg[t][i] * scale[j];
      if (rate > 0.0) {
        out.atom.rates[t].emplace_back(j, rate);
        out.atom.totals[j] += rate;
      }
    }
  }
  out.value = 0.0;
  for (int j = 0; j < num_jobs; ++j)
    out.value += coeff[j] * out.atom.totals[j];
  return out;
}

}  // namespace

OfflineSolution offline_solve(std::span<const Job> jobs,
                              std::span<const RateRegion* const> regions,
                              std::span<const Utility* const> utilities,
                              const OfflineOptions& options) {
  const int num_jobs = static_cast<int>(jobs.size());
  const int horizon = static_cast<int>(regions.size());

  OfflineSolution out;
  out.allocation.assign(horizon, {});
  out.totals.assign(num_jobs, 0.0);
  if (num_jobs == 0 || horizon == 0) return out;

  std::vector<const Utility*> utility(num_jobs);
  for (int j = 0; j < num_jobs; ++j)
    utility[j] = utilities.empty() ? &jobs[j].utility : utilities[j];

  double step_scale = 0.0;
  for (int j = 0; j < num_jobs; ++j)
    step_scale = std::max(step_scale, utility[j]->grad_at_zero());

  std::vector<Atom> atoms;
  atoms.push_back(Atom{{}, std::vector<double>(num_jobs, 0.0), 1.0});
  std::vector<double> totals(num_jobs, 0.0);
  std::vector<double> coeff(num_jobs);
  std::vector<double> multipliers(num_jobs, 0.0);

  auto objective_at = [&](const std::vector<double>& s) {
    double f = 0.0;
    for (int j = 0; j < num_jobs; ++j) f += utility[j]->eval(s[j]);
    return f;
  };

  double objective = 0.0;
  double gap = std::numeric_limits<double>::infinity();
  int iter = 0;
  for (; iter < options.max_outer; ++iter) {
    for (int j = 0; j < num_jobs; ++j) coeff[j] = utility[j]->grad(totals[j]);

    const double inner_target = 0.25 * options.tol * (1.0 + std::abs(objective));
    InnerLp lp = solve_budget_lp(jobs, regions, coeff, multipliers, step_scale,
                                 inner_target, options.max_inner);

    double linear_now = 0.0;
    for (int j = 0; j < num_jobs; ++j) linear_now += coeff[j] * totals[j];
    gap = lp.bound - linear_now;
    if (gap <= options.tol * (1.0 + std::abs(objective))) break;

    // Pairwise step toward the fresh atom, away from the active atom the
    // gradient likes least.
    int away = -1;
    double away_val = 0.0;
    for (size_t a = 0; a < atoms.size(); ++a) {
      if (atoms[a].weight <= 0.0) continue;
      double val = 0.0;
      for (int j = 0; j < num_jobs; ++j)
        val += coeff[j] * atoms[a].totals[j];
      if (away < 0 || val < away_val) {
        away = static_cast<int>(a);
        away_val = val;
      }
    }

    // Prefer the pairwise direction; an inexact inner atom can make it
    // unproductive, in which case blend toward the atom from the whole
    // point instead.
    std::vector<double> dir(num_jobs);
    bool pairwise = true;
    double step_max = atoms[away].weight;
    for (int j = 0; j < num_jobs; ++j)
      dir[j] = lp.atom.totals[j] - atoms[away].totals[j];
    double slope0 = 0.0;
    for (int j = 0; j < num_jobs; ++j) slope0 += coeff[j] * dir[j];
    if (slope0 <= 0.0) {
      pairwise = false;
      step_max = 1.0;
      for (int j = 0; j < num_jobs; ++j)
        dir[j] = lp.atom.totals[j] - totals[j];
    }

    auto slope_at = [&](double step) {
      double s = 0.0;
      for (int j = 0; j < num_jobs; ++j) {
        if (dir[j] == 0.0) continue;
        s += dir[j] *
             utility[j]->grad(std::max(totals[j] + step * dir[j], 0.0));
      }
      return s;
    };
    double step = step_max;
    if (slope_at(0.0) <= 0.0) {
      step = 0.0;
    } else if (slope_at(step_max) < 0.0) {
      double lo = 0.0, hi = step_max;
      for (int b = 0; b < 60 && hi - lo > 1e-14 * step_max; ++b) {
        const double mid = 0.5 * (lo + hi);
        (slope_at(mid) > 0.0 ? lo : hi) = mid;
      }
      step = 0.5 * (lo + hi);
    }
    if (step <= 0.0) break;

    for (int j = 0; j < num_jobs; ++j)
      totals[j] = std::max(totals[j] + step * dir[j], 0.0);
    if (pairwise) {
      atoms[away].weight -= step;
      if (atoms[away].weight <= 1e-15) atoms.erase(atoms.begin() + away);
    } else {
      for (auto& atom : atoms) atom.weight *= 1.0 - step;
      std::erase_if(atoms, [](const Atom& a) { return a.weight <= 1e-15; });
    }
    lp.atom.weight = step;
    atoms.push_back(std::move(lp.atom));

    objective = objective_at(totals);
  }

  objective = objective_at(totals);
  out.objective = objective;
  out.gap = std::max(gap, 0.0);
  out.iterations = iter;
  out.converged = gap <= options.tol * (1.0 + std::abs(objective));
  if (!out.converged && options.throw_on_failure)
    throw SolverError("offline_solve: certified gap above tolerance", gap);

  // Assemble the mixed allocation.
  for (const auto& atom : atoms) {
    if (atom.weight <= 0.0 || atom.rates.empty()) continue;
    for (int t = 0; t < horizon; ++t) {
      for (const auto& [j, r] : atom.rates[t]) {
        bool merged = false;
        for (auto& [ej, er] : out.allocation[t]) {
          if (ej == j) {
            er += atom.weight * r;
            merged = true;
            break;
          }
        }
        if (!merged) out.allocation[t].emplace_back(j, atom.weight * r);
      }
    }
  }
  for (int t = 0; t < horizon; ++t)
    for (const auto& [j, r] : out.allocation[t]) out.totals[j] += r;
  return out;
}

OfflineSolution offline_solve(const Instance& instance,
                              const OfflineOptions& options) {
  std::vector<const RateRegion*> regions;
  regions.reserve(instance.regions.size());
  for (const auto& r : instance.regions) regions.push_back(&r);
  return offline_solve(instance.jobs, regions, {}, options);
}

OfflineSolution brute_force_solve(std::span<const Job> jobs,
                                  std::span<const RateRegion* const> regions,
                                  double grid_step) {
  const int horizon = static_cast<int>(regions.size());
  const int num_jobs = static_cast<int>(jobs.size());
  if (horizon > 4 || num_jobs > 3)
    throw std::invalid_argument("brute_force_solve: instance too large");
  for (const auto* region : regions) {
    if (region->num_users() > 2 || region->vertices().size() > 3)
      throw std::invalid_argument("brute_force_solve: instance too large");
  }
  if (!(grid_step > 0.0))
    throw std::invalid_argument("brute_force_solve: grid step must be > 0");

  OfflineSolution out;
  out.allocation.assign(horizon, {});
  out.totals.assign(num_jobs, 0.0);
  if (num_jobs == 0) return out;

  const double h = grid_step;

  // Per-job level caps: the budget, gridded.
  std::vector<int> levels(num_jobs);
  std::int64_t num_states = 1;
  for (int j = 0; j < num_jobs; ++j) {
    levels[j] = static_cast<int>(std::floor(jobs[j].size / h + 1e-9)) + 1;
    num_states *= levels[j];
    if (num_states > 4'000'000)
      throw std::invalid_argument("brute_force_solve: state grid too large");
  }
  std::vector<std::int64_t> stride(num_jobs, 1);
  for (int j = 1; j < num_jobs; ++j) stride[j] = stride[j - 1] * levels[j - 1];

  // Per-slot feasible gridded actions (job service levels).
  std::vector<std::vector<std::vector<int>>> slot_actions(horizon);
  for (int t = 0; t < horizon; ++t) {
    const int num_users = regions[t]->num_users();
    std::vector<int> max_level(num_jobs, 0);
    for (int j = 0; j < num_jobs; ++j) {
      if (!jobs[j].active_at(t)) continue;
      const double peak = regions[t]->max_rate(jobs[j].user);
      max_level[j] = static_cast<int>(std::floor(peak / h + 1e-9));
    }
    std::int64_t combos = 1;
    for (int j = 0; j < num_jobs; ++j) combos *= max_level[j] + 1;
    if (combos > 400'000)
      throw std::invalid_argument("brute_force_solve: action grid too large");

    std::vector<int> action(num_jobs, 0);
    std::vector<double> user_sum(num_users);
    for (std::int64_t code = 0; code < combos; ++code) {
      std::int64_t rest = code;
      for (int j = 0; j < num_jobs; ++j) {
        action[j] = static_cast<int>(rest % (max_level[j] + 1));
        rest /= max_level[j] + 1;
      }
      std::fill(user_sum.begin(), user_sum.end(), 0.0);
      for (int j = 0; j < num_jobs; ++j)
        user_sum[jobs[j].user] += action[j] * h;
      if (regions[t]->contains(user_sum, 1e-9)) slot_actions[t].push_back(action);
    }
  }

  // Forward reachability over gridded cumulative service; allocations that
  // would cross a budget are trimmed to land on it, which stays feasible by
  // free disposal.
  std::vector<std::vector<char>> reach(horizon + 1,
                                       std::vector<char>(num_states, 0));
  reach[0][0] = 1;
  std::vector<int> st(num_jobs), nx(num_jobs);
  for (int t = 0; t < horizon; ++t) {
    for (std::int64_t code = 0; code < num_states; ++code) {
      if (!reach[t][code]) continue;
      std::int64_t rest = code;
      for (int j = 0; j < num_jobs; ++j) {
        st[j] = static_cast<int>(rest % levels[j]);
        rest /= levels[j];
      }
      for (const auto& action : slot_actions[t]) {
        std::int64_t next = 0;
        for (int j = 0; j < num_jobs; ++j)
          next += stride[j] * std::min(st[j] + action[j], levels[j] - 1);
        reach[t + 1][next] = 1;
      }
    }
  }

  // Best final state.
  double best = -1.0;
  std::int64_t best_code = 0;
  for (std::int64_t code = 0; code < num_states; ++code) {
    if (!reach[horizon][code]) continue;
    std::int64_t rest = code;
    double value = 0.0;
    for (int j = 0; j < num_jobs; ++j) {
      value += jobs[j].utility.eval(static_cast<double>(rest % levels[j]) * h);
      rest /= levels[j];
    }
    if (value > best) {
      best = value;
      best_code = code;
    }
  }

  // Backtrack one feasible trajectory into the best state.
  std::int64_t cur = best_code;
  for (int t = horizon - 1; t >= 0; --t) {
    std::int64_t rest = cur;
    for (int j = 0; j < num_jobs; ++j) {
      nx[j] = static_cast<int>(rest % levels[j]);
      rest /= levels[j];
    }
    bool found = false;
    for (std::int64_t code = 0; code < num_states && !found; ++code) {
      if (!reach[t][code]) continue;
      std::int64_t r2 = code;
      for (int j = 0; j < num_jobs; ++j) {
        st[j] = static_cast<int>(r2 % levels[j]);
        r2 /= levels[j];
      }
      for (const auto& action : slot_actions[t]) {
        bool match = true;
        for (int j = 0; j < num_jobs && match; ++j)
          match = std::min(st[j] + action[j], levels[j] - 1) == nx[j];
        if (match) {
          for (int j = 0; j < num_jobs; ++j)
            if (nx[j] > st[j])
              out.allocation[t].emplace_back(j, (nx[j] - st[j]) * h);
          cur = code;
          found = true;
          break;
        }
      }
    }
  }

  for (int t = 0; t < horizon; ++t)
    for (const auto& [j, r] : out.allocation[t]) out.totals[j] += r;
  out.objective = best;

  // Conservative Lipschitz envelope of the grid truncation.
  double lipschitz = 0.0;
  for (int j = 0; j < num_jobs; ++j)
    lipschitz += jobs[j].utility.grad_at_zero();
  out.gap = lipschitz * h * horizon;
  return out;
}

OfflineSolution brute_force_solve(const Instance& instance, double grid_step) {
  std::vector<const RateRegion*> regions;
  regions.reserve(instance.regions.size());
  for (const auto& r : instance.regions) regions.push_back(&r);
  return brute_force_solve(instance.jobs, regions, grid_step);
}

RatioReport competitive_ratio(double online_primal,
                              const OfflineSolution& offline,
                              double dual_value) {
  RatioReport report;
  const double upper = offline.objective + offline.gap;
  if (online_primal <= 0.0) {
    if (upper > 1e-12) {
      report.infinite = true;
      report.vs_offline = std::numeric_limits<double>::infinity();
      report.vs_dual = std::numeric_limits<double>::infinity();
    }
    return report;  // empty instance: 1 by convention
  }
  report.vs_offline = upper / online_primal;
  report.vs_dual = dual_value / online_primal;
  return report;
}

}  // namespace dsched
