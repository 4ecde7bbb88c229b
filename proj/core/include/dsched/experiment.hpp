#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dsched/checks.hpp"
#include "dsched/config.hpp"
#include "dsched/offline.hpp"
#include "dsched/stochastic.hpp"
#include "dsched/workload.hpp"

namespace dsched {

enum class Mode { kAdversarial, kStochastic };

// Parsed experiment description: which scenario, which algorithms, which
// seeds, where artifacts go.
struct ExperimentSpec {
  Mode mode = Mode::kAdversarial;
  std::vector<std::string> algos;  // do lightweight edd greedy primal offline
                                   // lfdo dlookahead
  std::vector<std::uint64_t> seeds;
  std::string out_dir = "out";
  ScenarioConfig scenario;
  FrameConfig frame;
  double lfdo_v = 1.0;
  OnlinePolicy lfdo_engine = OnlinePolicy::kFull;
  SlotSolveOptions solver;
  OfflineOptions offline;
  bool benchmark_lookahead = false;
  bool write_traces = true;
  int threads = 0;  // 0: hardware concurrency

  // Reads the flat key=value format; DSCHED_OUT_ROOT prefixes out_dir.
  static ExperimentSpec parse(const Config& config);
  static ExperimentSpec parse_file(const std::string& path);
};

// One (seed, algorithm) cell of an experiment.
struct CellResult {
  std::string algo;
  std::uint64_t seed = 0;
  bool ok = true;
  std::string error;

  double reward = 0.0;  // P, or total frame reward in stochastic mode
  double dual = 0.0;
  double growth = 0.0;
  double f_max = 0.0;
  double bound = 0.0;
  double dual_ratio = 0.0;  // D / P
  LemmaCounts lemmas;
  long feasibility_violations = 0;
  bool duality_ok = true;   // P <= D
  bool theorem_ok = true;   // D <= P * bound (full step only)

  double offline_objective = 0.0;
  double offline_gap = 0.0;

  // Stochastic extras.
  std::vector<double> avg_served;
  std::vector<double> queue_over_k;
  double queue_identity_residual = 0.0;
  long lookahead_dominance_violations = 0;
};

struct ExperimentResult {
  std::vector<CellResult> cells;
  int exit_code = 0;  // 0 ok, 2 invariant violation, 3 solver failure
  std::vector<std::string> problems;
};

ExperimentResult run_experiment(const ExperimentSpec& spec);

// Re-runs the experiment once per value of p, D_max, V or delta; aggregated
// rows land in <out>/sweep.csv.
ExperimentResult sweep(const ExperimentSpec& spec, const std::string& param,
                       const std::vector<double>& values);

struct ValidationItem {
  std::string name;
  bool pass = false;
  double residual = 0.0;
  std::string detail;
};

struct ValidationReport {
  std::vector<ValidationItem> items;
  bool all_pass() const;
};

// The module-level invariant suites: numerics identities, oracle
// optimality, the per-slot lemma battery, queue identities, brute-force
// agreement, determinism, and the corrupted-beta negative control.
ValidationReport validate(const ExperimentSpec& spec);

// Loads a serialized instance and runs one algorithm over it.
CellResult replay(const std::string& instance_path, const std::string& algo,
                  const ExperimentSpec& spec);

// Aligned tiny instances inside the brute-force guards: vertex coordinates
// and job sizes are multiples of the oracle grid step, so the grid optimum
// matches the continuous one tightly.
std::vector<Instance> make_tiny_instances(int count, std::uint64_t seed0);
constexpr double kTinyGridStep = 0.05;

}  // namespace dsched
