#pragma once

#include <vector>

#include "dsched/rate_region.hpp"
#include "dsched/utility.hpp"

namespace dsched {

// One transmission request: active (may receive rate) on every slot of the
// inclusive window [arrival, deadline].
struct Job {
  int id = 0;
  int arrival = 0;
  int deadline = 0;
  double size = 0.0;
  int user = 0;  // 0-based user index
  PowerUtility utility{1.0, 0.5};

  bool active_at(int t) const { return arrival <= t && t <= deadline; }
};

// A full adversarial-horizon problem: jobs plus one rate region per slot.
struct Instance {
  int num_users = 0;
  int horizon = 0;
  std::vector<Job> jobs;
  std::vector<RateRegion> regions;
  // Measured capacity-to-size ratio: max over (slot, job) of the job's
  // user peak rate divided by the job size. Must stay below 1 for the
  // primal-dual constants to make sense.
  double f_max = 0.0;
};

// max_{t,j} (peak rate of job j's user in regions[t] over j's window) / Y_j.
double measure_f_max(const std::vector<Job>& jobs,
                     const std::vector<RateRegion>& regions);

}  // namespace dsched
