#include <sstream>

#include "doctest.h"
#include "dsched/workload.hpp"

using namespace dsched;

TEST_CASE("generated jobs respect windows, sizes and f_max") {
  ScenarioConfig config;
  config.num_users = 3;
  config.horizon = 100;
  config.arrival_prob = 0.3;
  config.seed = 21;
  const Instance instance = generate_instance(config);

  CHECK(instance.regions.size() == 100);
  CHECK_FALSE(instance.jobs.empty());
  for (const auto& job : instance.jobs) {
    CHECK(job.arrival <= job.deadline);
    CHECK(job.deadline < config.horizon);
    CHECK(job.size >= 5.0);
    CHECK(job.size <= 25.0);
    CHECK(job.user >= 0);
    CHECK(job.user < 3);
  }
  // Caps default to 4 and the minimum size is 5.
  CHECK(instance.f_max < 1.0);
  CHECK(instance.f_max <= 4.0 / 5.0 + 1e-12);
  CHECK(instance.f_max > 0.0);
}

TEST_CASE("zero arrival probability yields an empty workload") {
  ScenarioConfig config;
  config.arrival_prob = 0.0;
  config.horizon = 20;
  const Instance instance = generate_instance(config);
  CHECK(instance.jobs.empty());
  CHECK(instance.f_max == 0.0);
}

TEST_CASE("generation is deterministic in the seed") {
  ScenarioConfig config;
  config.seed = 77;
  config.horizon = 50;
  const Instance a = generate_instance(config);
  const Instance b = generate_instance(config);
  REQUIRE(a.jobs.size() == b.jobs.size());
  for (size_t j = 0; j < a.jobs.size(); ++j) {
    CHECK(a.jobs[j].arrival == b.jobs[j].arrival);
    CHECK(a.jobs[j].size == b.jobs[j].size);
    CHECK(a.jobs[j].utility.scale() == b.jobs[j].utility.scale());
  }
  for (int t = 0; t < 50; ++t)
    CHECK(a.regions[t].vertices() == b.regions[t].vertices());

  ScenarioConfig other = config;
  other.seed = 78;
  const Instance c = generate_instance(other);
  CHECK(a.f_max != c.f_max);
}

TEST_CASE("instance serialization round trip at 12 digits") {
  ScenarioConfig config;
  config.seed = 5;
  config.horizon = 12;
  config.num_users = 2;
  const Instance original = generate_instance(config);

  std::stringstream buffer;
  write_instance(original, buffer);
  const std::string once = buffer.str();
  const Instance loaded = read_instance(buffer);

  REQUIRE(loaded.jobs.size() == original.jobs.size());
  CHECK(loaded.horizon == original.horizon);
  for (size_t j = 0; j < loaded.jobs.size(); ++j) {
    CHECK(loaded.jobs[j].arrival == original.jobs[j].arrival);
    CHECK(loaded.jobs[j].deadline == original.jobs[j].deadline);
    CHECK(loaded.jobs[j].user == original.jobs[j].user);
  }

  // Writing the parsed instance again reproduces the bytes exactly.
  std::stringstream again;
  write_instance(loaded, again);
  CHECK(again.str() == once);
}

TEST_CASE("frame generation keeps jobs inside frames") {
  FrameConfig config;
  config.num_users = 2;
  config.frame_len = 5;
  config.num_frames = 40;
  config.region_set_size = 6;
  config.rate_caps = {0.3, 0.4};
  config.targets = {0.1, 0.0};
  config.classes = {
      JobClass{0, 1.0, 5, 0.5, 0.5, 1.0},
      JobClass{1, 2.0, 3, 0.7, 0.3, 0.6},
  };
  config.seed = 9;
  const StochasticInstance instance = generate_frames(config);

  CHECK(instance.frames.size() == 40);
  CHECK(instance.region_set.size() == 6);
  for (const auto& frame : instance.frames) {
    CHECK(frame.region_ids.size() == 5);
    for (int id : frame.region_ids) {
      CHECK(id >= 0);
      CHECK(id < 6);
    }
    CHECK(frame.jobs.size() <= config.classes.size());  // bounded arrivals
    for (const auto& job : frame.jobs) {
      CHECK(job.arrival == 0);
      CHECK(job.deadline < config.frame_len);  // expires inside the frame
    }
  }
  CHECK(instance.f_max == doctest::Approx(0.0).epsilon(1.0));  // finite
  CHECK(instance.f_max < 1.0);

  FrameConfig bad = config;
  bad.classes[0].deadline = 6;
  CHECK_THROWS_AS(generate_frames(bad), std::invalid_argument);
}

TEST_CASE("peak-rate normalization pins each user's best vertex") {
  FrameConfig config;
  config.num_users = 5;
  config.frame_len = 10;
  config.num_frames = 1;
  config.region_set_size = 10;
  config.rate_caps = {0.005, 0.05, 0.05, 0.05, 0.05};
  config.normalize_peak_rates = true;
  config.classes = {JobClass{0, 0.06, 10, 0.5, 0.5, 1.0}};
  const StochasticInstance instance = generate_frames(config);
  for (const auto& region : instance.region_set) {
    for (int n = 0; n < 5; ++n)
      CHECK(region.max_rate(n) ==
            doctest::Approx(config.rate_caps[n]).epsilon(1e-12));
  }
  // User 0's peak per frame is exactly frame_len * cap = 0.05.
  CHECK(10 * instance.region_set[0].max_rate(0) == doctest::Approx(0.05));
}
