#include <cmath>

#include "doctest.h"
#include "dsched/slot_solver.hpp"

using namespace dsched;

TEST_CASE("empty job list solves to nothing") {
  const RateRegion region(1, {{1.0}});
  const auto result = solve_slot({}, region, {});
  CHECK(result.rates.empty());
  CHECK(result.objective == 0.0);
  CHECK(result.converged);
}

TEST_CASE("single job takes the full rate when unpriced") {
  const PowerUtility f(1.0, 0.5);
  const RateRegion region(1, {{0.8}});
  const SlotJob job{0, 0, &f, 0.0, 0.0, 100.0};
  const auto result = solve_slot(std::vector<SlotJob>{job}, region, {});
  CHECK(result.rates[0] == doctest::Approx(0.8).epsilon(1e-9));
  CHECK(result.objective == doctest::Approx(f.eval(0.8)).epsilon(1e-9));
}

TEST_CASE("a price above the marginal blocks allocation") {
  const PowerUtility f(1.0, 0.5);
  const RateRegion region(1, {{0.8}});
  const SlotJob job{0, 0, &f, 0.0, f.grad(0.0) + 1.0, 100.0};
  const auto result = solve_slot(std::vector<SlotJob>{job}, region, {});
  CHECK(result.rates[0] == 0.0);
  CHECK(result.converged);
}

TEST_CASE("caps flatten the objective and clip the answer") {
  const PowerUtility f(1.0, 0.5);
  const RateRegion region(1, {{1.0}});
  const SlotJob job{0, 0, &f, 0.0, 0.0, 0.25};
  const auto result = solve_slot(std::vector<SlotJob>{job}, region, {});
  CHECK(result.rates[0] <= 0.25 + 1e-12);
  CHECK(result.rates[0] == doctest::Approx(0.25).epsilon(1e-7));
}

TEST_CASE("two users split along the region tradeoff") {
  // One vertex per extreme plus a balanced one; equal fresh jobs should pull
  // the solution toward the balanced vertex or an equivalent mixture.
  const PowerUtility f(1.0, 0.5);
  const RateRegion region(2, {{1.0, 0.0}, {0.0, 1.0}, {0.7, 0.7}});
  const std::vector<SlotJob> jobs = {
      SlotJob{0, 0, &f, 0.0, 0.0, 10.0},
      SlotJob{1, 1, &f, 0.0, 0.0, 10.0},
  };
  const auto result = solve_slot(jobs, region, {});
  const double phi = f.eval(result.rates[0]) + f.eval(result.rates[1]);
  CHECK(phi == doctest::Approx(2.0 * f.eval(0.7)).epsilon(1e-7));
}

TEST_CASE("within a user the higher marginal job wins first") {
  const PowerUtility strong(1.0, 0.5), weak(0.2, 0.5);
  const RateRegion region(1, {{0.5}});
  const std::vector<SlotJob> jobs = {
      SlotJob{0, 0, &weak, 0.0, 0.0, 10.0},
      SlotJob{1, 0, &strong, 0.0, 0.0, 10.0},
  };
  const auto result = solve_slot(jobs, region, {});
  // grad_strong(0.5) = 1.29 > grad_weak(0) = 0.63: everything to job 1.
  CHECK(result.rates[1] == doctest::Approx(0.5).epsilon(1e-7));
  CHECK(result.rates[0] == doctest::Approx(0.0).epsilon(1e-7));
}

TEST_CASE("first-order certificate holds at the solution") {
  // The returned gap is the attainment residual of the linear oracle at the
  // final gradients; spot-check it against a fresh computation.
  const PowerUtility a(0.9, 0.3), b(0.4, 0.7), c(1.0, 0.5);
  const RateRegion region(2, {{0.9, 0.1}, {0.3, 0.8}, {0.5, 0.5}});
  const std::vector<SlotJob> jobs = {
      SlotJob{0, 0, &a, 0.2, 0.1, 5.0},
      SlotJob{1, 0, &b, 0.0, 0.05, 5.0},
      SlotJob{2, 1, &c, 1.0, 0.3, 5.0},
  };
  SlotSolveOptions options;
  options.gap_tol = 1e-9;
  const auto result = solve_slot(jobs, region, options);
  REQUIRE(result.converged);

  std::vector<double> weights(2, 0.0);
  for (size_t i = 0; i < jobs.size(); ++i) {
    const double g =
        jobs[i].utility->grad(jobs[i].served + result.rates[i]) - jobs[i].beta;
    weights[jobs[i].user] = std::max(weights[jobs[i].user], g);
  }
  double attained = 0.0;
  for (size_t i = 0; i < jobs.size(); ++i) {
    const double g =
        jobs[i].utility->grad(jobs[i].served + result.rates[i]) - jobs[i].beta;
    attained += g * result.rates[i];
  }
  const double best = region.linear_max(weights).objective;
  CHECK(best - attained <= 1e-8 * (1.0 + std::abs(best)));
}

TEST_CASE("iteration cap reports failure honestly") {
  // Two extreme vertices and symmetric jobs: the optimum is an equal
  // mixture, unreachable in one step.
  const PowerUtility f(1.0, 0.5);
  const RateRegion region(2, {{1.0, 0.0}, {0.0, 1.0}});
  const std::vector<SlotJob> jobs = {
      SlotJob{0, 0, &f, 0.0, 0.0, 10.0},
      SlotJob{1, 1, &f, 0.0, 0.0, 10.0},
  };
  SlotSolveOptions options;
  options.max_iterations = 1;
  options.gap_tol = 1e-12;
  options.throw_on_failure = false;
  const auto result = solve_slot(jobs, region, options);
  CHECK_FALSE(result.converged);
  CHECK(result.gap > 0.0);

  options.throw_on_failure = true;
  CHECK_THROWS_AS(solve_slot(jobs, region, options), SolverError);
}
