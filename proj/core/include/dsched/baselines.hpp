#pragma once

#include <span>

#include "dsched/scheduler.hpp"

namespace dsched {

// Earliest-due-date: each user's rate goes to its unfinished active job with
// the earliest deadline, capped at the remaining size and spilling to the
// next-earliest within the slot. The only step in the library that reads
// deadlines.
SlotDecision edd_step(SchedulerState& state, std::span<const Job> jobs,
                      std::span<const int> active, const RateRegion& region);

// Linear-reward surrogate: jobs ranked by their initial marginal value
// grad(0); cap-and-spill like EDD.
SlotDecision greedy_step(SchedulerState& state, std::span<const int> active,
                         const RateRegion& region);

// Marginal-utility maximization with no dual discounting: the do_step
// program with beta = 0 and hard remaining-size caps.
SlotDecision primal_step(SchedulerState& state, std::span<const int> active,
                         const RateRegion& region,
                         const SlotSolveOptions& options);

enum class Baseline { kEdd, kGreedy, kPrimal };

OnlineRun run_baseline(const Instance& instance, Baseline baseline,
                       const RunOptions& options);

}  // namespace dsched
