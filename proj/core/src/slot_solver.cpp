#include "dsched/slot_solver.hpp"

#include <algorithm>
#include <cmath>

#include "simplex.hpp"

namespace dsched {

namespace {

using Entries = std::vector<std::pair<int, double>>;  // (job position, rate)

struct Atom {
  Entries entries;
  double weight = 0.0;
};

double phi_term(const SlotJob& job, double x) {
  x = std::clamp(x, 0.0, job.cap);
  return job.utility->eval(job.served + x) - job.utility->eval(job.served) -
         job.beta * x;
}

double phi_slope(const SlotJob& job, double x) {
  x = std::clamp(x, 0.0, job.cap);
  return job.utility->grad(job.served + x) - job.beta;
}

double dot_sparse(const Entries& entries, std::span<const double> dense) {
  double acc = 0.0;
  for (const auto& [j, r] : entries) acc += dense[j] * r;
  return acc;
}

// Exact linear oracle over { x in [0, cap], per-user sums in the region }:
// a small LP over (x, lambda) when some cap can bind, otherwise the region's
// vertex oracle with each user's rate on its best job.
class SlotOracle {
 public:
  SlotOracle(std::span<const SlotJob> jobs, const RateRegion& region)
      : jobs_(jobs), region_(region) {
    const int num_users = region.num_users();
    peak_.resize(num_users);
    for (int n = 0; n < num_users; ++n) peak_[n] = region.max_rate(n);

    // Caps matter only for jobs that can ever price positive; gradients
    // only fall as service grows, so the check at x = 0 is conservative.
    for (const auto& job : jobs_) {
      if (phi_slope(job, 0.0) > 0.0 && job.cap < peak_[job.user]) {
        capped_ = true;
        break;
      }
    }
    if (capped_) build_lp();
  }

  // Returns max <grad, s> over the feasible set and the attaining atom.
  double best(std::span<const double> grad, Entries& target) const {
    return capped_ ? best_lp(grad, target) : best_vertex(grad, target);
  }

 private:
  double best_vertex(std::span<const double> grad, Entries& target) const {
    const int num_users = region_.num_users();
    std::vector<double> weights(num_users, 0.0);
    std::vector<int> best_job(num_users, -1);
    for (size_t i = 0; i < jobs_.size(); ++i) {
      const int n = jobs_[i].user;
      if (best_job[n] < 0 || grad[i] > grad[best_job[n]])
        best_job[n] = static_cast<int>(i);
    }
    for (int n = 0; n < num_users; ++n)
      if (best_job[n] >= 0) weights[n] = std::max(grad[best_job[n]], 0.0);

    const auto lm = region_.linear_max(weights);
    target.clear();
    for (int n = 0; n < num_users; ++n)
      if (weights[n] > 0.0 && lm.rates[n] > 0.0)
        target.emplace_back(best_job[n], lm.rates[n]);
    std::sort(target.begin(), target.end());
    return lm.objective;
  }

  void build_lp() {
    const int num_jobs = static_cast<int>(jobs_.size());
    const int num_users = region_.num_users();
    const int num_verts = static_cast<int>(region_.vertices().size());
    const int vars = num_jobs + num_verts;

    // Rows: per-job caps, per-user coupling sum_j x_j - V lambda <= 0, and
    // the vertex simplex sum lambda <= 1.
    lp_a_.assign(num_jobs + num_users + 1, std::vector<double>(vars, 0.0));
    lp_b_.assign(num_jobs + num_users + 1, 0.0);
    for (int j = 0; j < num_jobs; ++j) {
      lp_a_[j][j] = 1.0;
      lp_b_[j] = jobs_[j].cap;
    }
    for (int j = 0; j < num_jobs; ++j)
      lp_a_[num_jobs + jobs_[j].user][j] = 1.0;
    for (int i = 0; i < num_verts; ++i)
      for (int n = 0; n < num_users; ++n)
        lp_a_[num_jobs + n][num_jobs + i] = -region_.vertices()[i][n];
    for (int i = 0; i < num_verts; ++i) lp_a_.back()[num_jobs + i] = 1.0;
    lp_b_.back() = 1.0;
  }

  double best_lp(std::span<const double> grad, Entries& target) const {
    const int num_jobs = static_cast<int>(jobs_.size());
    std::vector<double> c(lp_a_[0].size(), 0.0);
    for (int j = 0; j < num_jobs; ++j) c[j] = std::max(grad[j], 0.0);
    const auto lp = detail::simplex_max(c, lp_a_, lp_b_);
    target.clear();
    for (int j = 0; j < num_jobs; ++j)
      if (lp.solution[j] > 1e-14 && grad[j] > 0.0)
        target.emplace_back(j, lp.solution[j]);
    return lp.objective;
  }

  std::span<const SlotJob> jobs_;
  const RateRegion& region_;
  std::vector<double> peak_;
  bool capped_ = false;
  std::vector<std::vector<double>> lp_a_;
  std::vector<double> lp_b_;
};

}  // namespace

SlotSolveResult solve_slot(std::span<const SlotJob> jobs,
                           const RateRegion& region,
                           const SlotSolveOptions& options) {
  const int num_jobs = static_cast<int>(jobs.size());
  SlotSolveResult result;
  result.rates.assign(num_jobs, 0.0);
  if (num_jobs == 0) return result;

  for (const auto& job : jobs)
    if (!(job.cap > 0.0))
      throw std::invalid_argument("solve_slot: job caps must be > 0");

  const SlotOracle oracle(jobs, region);
  std::vector<double> x(num_jobs, 0.0);
  std::vector<double> grad(num_jobs, 0.0);

  std::vector<Atom> atoms;
  atoms.push_back(Atom{{}, 1.0});  // the origin

  Entries target;
  auto measure = [&]() {
    for (int j = 0; j < num_jobs; ++j) grad[j] = phi_slope(jobs[j], x[j]);
    const double best = oracle.best(grad, target);
    double gx = 0.0;
    for (int j = 0; j < num_jobs; ++j) gx += grad[j] * x[j];
    return best - gx;  // first-order gap surrogate
  };

  double phi = 0.0;
  double gap = 0.0;
  int iter = 0;
  for (; iter < options.max_iterations; ++iter) {
    gap = measure();
    if (gap <= options.gap_tol * (1.0 + std::abs(phi))) break;

    // Pairwise step: move mass from the active atom the gradient likes
    // least onto the oracle's atom.
    int away = -1;
    double away_val = 0.0;
    for (size_t a = 0; a < atoms.size(); ++a) {
      if (atoms[a].weight <= 0.0) continue;
      const double val = dot_sparse(atoms[a].entries, grad);
      if (away < 0 || val < away_val) {
        away = static_cast<int>(a);
        away_val = val;
      }
    }

    // Direction d = target - away over the union of supports.
    Entries dir = target;
    for (const auto& [j, r] : atoms[away].entries) {
      bool merged = false;
      for (auto& [dj, dr] : dir) {
        if (dj == j) {
          dr -= r;
          merged = true;
          break;
        }
      }
      if (!merged) dir.emplace_back(j, -r);
    }
    const double step_max = atoms[away].weight;

    // 1-D concave line search on the slope's sign change.
    auto slope_at = [&](double step) {
      double s = 0.0;
      for (const auto& [j, d] : dir) s += d * phi_slope(jobs[j], x[j] + step * d);
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
    if (step <= 0.0) break;  // below line-search resolution

    for (const auto& [j, d] : dir)
      x[j] = std::clamp(x[j] + step * d, 0.0, jobs[j].cap);
    atoms[away].weight -= step;
    if (atoms[away].weight <= 1e-15) atoms.erase(atoms.begin() + away);
    bool found = false;
    for (auto& atom : atoms) {
      if (atom.entries == target) {
        atom.weight += step;
        found = true;
        break;
      }
    }
    if (!found) atoms.push_back(Atom{target, step});

    phi = 0.0;
    for (int j = 0; j < num_jobs; ++j) phi += phi_term(jobs[j], x[j]);
  }
  if (iter == options.max_iterations) gap = measure();

  result.objective = phi;
  result.gap = gap;
  result.iterations = iter;
  result.converged = gap <= options.gap_tol * (1.0 + std::abs(phi));
  if (!result.converged && options.throw_on_failure)
    throw SolverError("solve_slot: gap tolerance not reached", gap);

  for (int j = 0; j < num_jobs; ++j)
    result.rates[j] = std::min(x[j], jobs[j].cap);
  return result;
}

}  // namespace dsched
