#include <cmath>

#include "doctest.h"
#include "dsched/rate_region.hpp"

using dsched::RateRegion;
using dsched::Rng;
using dsched::sample_region;

namespace {

RateRegion two_user_simplex() {
  return RateRegion(2, {{1.0, 0.0}, {0.0, 1.0}});
}

}  // namespace

TEST_CASE("linear_max picks the best clipped vertex") {
  const auto region = two_user_simplex();

  auto lm = region.linear_max(std::vector<double>{2.0, 1.0});
  CHECK(lm.rates == std::vector<double>{1.0, 0.0});
  CHECK(lm.objective == doctest::Approx(2.0));

  lm = region.linear_max(std::vector<double>{-1.0, 3.0});
  CHECK(lm.rates == std::vector<double>{0.0, 1.0});
  CHECK(lm.objective == doctest::Approx(3.0));

  lm = region.linear_max(std::vector<double>{-1.0, -2.0});
  CHECK(lm.rates == std::vector<double>{0.0, 0.0});
  CHECK(lm.objective == 0.0);
}

TEST_CASE("region construction rejects bad input") {
  CHECK_THROWS_AS(RateRegion(2, {}), std::invalid_argument);
  CHECK_THROWS_AS(RateRegion(2, {{1.0}}), std::invalid_argument);
  CHECK_THROWS_AS(RateRegion(1, {{-0.5}}), std::invalid_argument);
}

TEST_CASE("contains decides hull membership exactly") {
  const auto region = two_user_simplex();
  CHECK(region.contains(std::vector<double>{0.5, 0.5}, 1e-9));
  CHECK_FALSE(region.contains(std::vector<double>{0.6, 0.6}, 1e-9));
  CHECK(region.contains(std::vector<double>{0.0, 0.0}, 0.0));
  CHECK(region.contains(std::vector<double>{1.0, 0.0}, 1e-12));
  CHECK_FALSE(region.contains(std::vector<double>{1.0 + 1e-6, 0.0}, 1e-9));
  // Componentwise domination by a single vertex.
  CHECK(region.contains(std::vector<double>{0.3, 0.0}, 0.0));
}

TEST_CASE("sampling is deterministic and respects caps") {
  const std::vector<double> caps = {0.5, 2.0, 1.0};
  Rng a(42), b(42);
  const auto r1 = sample_region(3, 5, caps, a);
  const auto r2 = sample_region(3, 5, caps, b);
  CHECK(r1.vertices() == r2.vertices());
  for (const auto& v : r1.vertices())
    for (int n = 0; n < 3; ++n) {
      CHECK(v[n] >= 0.0);
      CHECK(v[n] <= caps[n]);
    }
  CHECK(r1.max_rate(0) <= 0.5);
}

TEST_CASE("oracle optimality over random feasible points") {
  Rng rng(9);
  for (int trial = 0; trial < 20; ++trial) {
    const int users = 2 + static_cast<int>(rng.below(3));
    std::vector<double> caps(users);
    for (double& c : caps) c = rng.uniform(0.5, 3.0);
    const auto region =
        sample_region(users, 1 + static_cast<int>(rng.below(8)), caps, rng);

    std::vector<double> coeffs(users);
    for (double& c : coeffs) c = rng.uniform(-1.0, 2.0);
    const auto lm = region.linear_max(coeffs);

    CHECK(region.contains(lm.rates, 1e-9));

    for (int p = 0; p < 50; ++p) {
      // Clipped convex combination of vertices: always feasible.
      std::vector<double> lambda(region.vertices().size());
      double total = 0.0;
      for (double& l : lambda) {
        l = rng.uniform01();
        total += l;
      }
      const double shrink = rng.uniform01() / std::max(total, 1e-12);
      std::vector<double> x(users, 0.0);
      for (size_t i = 0; i < lambda.size(); ++i)
        for (int n = 0; n < users; ++n)
          x[n] += shrink * lambda[i] * region.vertices()[i][n];
      double value = 0.0;
      for (int n = 0; n < users; ++n)
        if (coeffs[n] > 0.0) value += coeffs[n] * x[n];
      CHECK(value <= lm.objective + 1e-9);
    }

    // Positive homogeneity of the support function.
    const double k = rng.uniform(0.1, 5.0);
    std::vector<double> scaled(coeffs);
    for (double& c : scaled) c *= k;
    CHECK(region.linear_max(scaled).objective ==
          doctest::Approx(k * lm.objective).epsilon(1e-12));
  }
}
