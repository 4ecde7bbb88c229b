#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "dsched/job.hpp"

namespace dsched {

// Random scenario for the adversarial-horizon setting: per slot and user,
// a Bernoulli(arrival_prob) job with a uniform size, deadline and reward.
struct ScenarioConfig {
  int num_users = 3;
  int horizon = 100;
  double arrival_prob = 0.3;
  double size_min = 5.0;
  double size_max = 25.0;
  int deadline_min = 2;   // window length lower bound, in slots
  int deadline_max = 10;  // D_max
  double v_min = 0.01;
  double v_max = 1.0;
  double psi_min = 0.01;
  double psi_max = 0.99;
  int region_vertices = 8;
  std::vector<double> rate_caps;  // per user; empty means 4.0 for everyone
  std::uint64_t seed = 1;
};

Instance generate_instance(const ScenarioConfig& config);

// One job class of the frame-based stochastic setting: a fixed shape that
// arrives independently each frame with probability arrival_prob.
struct JobClass {
  int user = 0;
  double size = 1.0;
  int deadline = 1;  // slots of activity from the frame start, <= frame_len
  double v = 0.5;
  double psi = 0.5;
  double arrival_prob = 1.0;
};

struct FrameConfig {
  int num_users = 5;
  int frame_len = 10;    // D
  int num_frames = 100;  // K
  std::vector<JobClass> classes;
  std::vector<double> targets;  // per-user timely-throughput floor delta_n
  int region_set_size = 20;     // finite set the per-slot regions draw from
  int region_vertices = 8;
  std::vector<double> rate_caps;
  // Rescale every region in the set so each user's best vertex coordinate
  // equals its cap. Pins the peak per-frame service of user n to
  // frame_len * rate_caps[n] exactly.
  bool normalize_peak_rates = false;
  std::uint64_t seed = 1;
};

// One realized frame: jobs arriving at the frame start and expiring inside
// it, plus per-slot indices into the finite region set.
struct Frame {
  std::vector<Job> jobs;        // arrival/deadline in frame-local slots
  std::vector<int> region_ids;  // frame_len entries
};

struct StochasticInstance {
  int num_users = 0;
  int frame_len = 0;
  std::vector<double> targets;
  std::vector<RateRegion> region_set;
  std::vector<Frame> frames;
  double f_max = 0.0;  // over the whole region set and all class sizes
};

StochasticInstance generate_frames(const FrameConfig& config);

// Line-oriented text round trip with 12-significant-digit decimals, so
// instances replay across implementations.
void write_instance(const Instance& instance, std::ostream& out);
Instance read_instance(std::istream& in);
void save_instance(const Instance& instance, const std::string& path);
Instance load_instance(const std::string& path);

}  // namespace dsched
