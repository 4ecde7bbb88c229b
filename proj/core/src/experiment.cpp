#include "dsched/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <sstream>
#include <thread>

#include "dsched/baselines.hpp"
#include "dsched/csv.hpp"

namespace dsched {

namespace {

const std::vector<std::string> kTraceHeader = {"algo", "seed", "t",  "job",
                                               "x",    "alpha", "beta", "dP"};
const std::vector<std::string> kSummaryHeader = {
    "algo",       "seed",     "P",          "D",           "C",
    "F_max",      "bound",    "D_over_P",   "duality_ok",  "theorem_ok",
    "lemma_viol", "feas_viol"};

std::string cell_stem(const ExperimentSpec& spec, const std::string& algo,
                      std::uint64_t seed) {
  return spec.out_dir + "/" + algo + "_seed" + std::to_string(seed);
}

bool is_online_algo(const std::string& algo) {
  return algo == "do" || algo == "lightweight";
}

bool is_baseline_algo(const std::string& algo) {
  return algo == "edd" || algo == "greedy" || algo == "primal";
}

Baseline baseline_from_name(const std::string& algo) {
  if (algo == "edd") return Baseline::kEdd;
  if (algo == "greedy") return Baseline::kGreedy;
  return Baseline::kPrimal;
}

// Parallel map over the cells; deterministic because each cell is a pure
// function of (spec, seed, algo) and results land by index.
void parallel_cells(int threads, int count,
                    const std::function<void(int)>& work) {
  if (threads <= 0)
    threads = static_cast<int>(std::thread::hardware_concurrency());
  threads = std::max(1, std::min(threads, count));
  if (threads == 1) {
    for (int i = 0; i < count; ++i) work(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (int w = 0; w < threads; ++w) {
    pool.emplace_back([&]() {
      for (int i = next.fetch_add(1); i < count; i = next.fetch_add(1))
        work(i);
    });
  }
  for (auto& t : pool) t.join();
}

long check_baseline_feasibility(const OnlineRun& run, const Instance& instance) {
  long violations = 0;
  for (const auto& decision : run.decisions) {
    if (decision.rates.empty()) continue;
    if (!instance.regions[decision.slot].contains(decision.user_rates, 1e-9))
      ++violations;
  }
  for (int j = 0; j < run.state.num_jobs(); ++j)
    if (run.state.served(j) > run.state.size(j) + 1e-9) ++violations;
  return violations;
}

void write_adversarial_summary(CsvWriter& summary, const CellResult& cell) {
  summary.row({cell.algo, std::to_string(cell.seed), format_number(cell.reward),
               format_number(cell.dual), format_number(cell.growth),
               format_number(cell.f_max), format_number(cell.bound),
               format_number(cell.dual_ratio), cell.duality_ok ? "1" : "0",
               cell.theorem_ok ? "1" : "0",
               std::to_string(cell.lemmas.total()),
               std::to_string(cell.feasibility_violations)});
}

CellResult run_adversarial_cell(const ExperimentSpec& spec,
                                const std::string& algo, std::uint64_t seed) {
  CellResult cell;
  cell.algo = algo;
  cell.seed = seed;

  ScenarioConfig scenario = spec.scenario;
  scenario.seed = seed;
  const Instance instance = generate_instance(scenario);

  RunOptions options;
  options.solver = spec.solver;

  std::unique_ptr<CsvWriter> trace;
  if (spec.write_traces) {
    trace = std::make_unique<CsvWriter>(cell_stem(spec, algo, seed) + "_trace.csv",
                                        kTraceHeader);
    options.slot_sink = [&](const SchedulerState& state,
                            const SlotDecision& d) {
      for (const auto& [j, x] : d.rates)
        trace->row({algo, std::to_string(seed), std::to_string(d.slot),
                    std::to_string(j), format_number(x),
                    format_number(state.alpha(j)), format_number(state.beta(j)),
                    format_number(d.reward_gain)});
    };
  }

  if (algo == "offline") {
    const OfflineSolution sol = offline_solve(instance, spec.offline);
    cell.reward = sol.objective;
    cell.offline_objective = sol.objective;
    cell.offline_gap = sol.gap;
    cell.ok = sol.converged;
    if (!sol.converged) cell.error = "offline gap above tolerance";
    CsvWriter dump(cell_stem(spec, algo, seed) + "_solution.csv",
                   {"t", "job", "x"});
    for (size_t t = 0; t < sol.allocation.size(); ++t)
      for (const auto& [j, x] : sol.allocation[t])
        dump.row({std::to_string(t), std::to_string(j), format_number(x)});
    return cell;
  }

  if (is_online_algo(algo)) {
    const bool full = algo == "do";
    LemmaAuditor::Options audit_options;
    audit_options.check_attainment = full;
    LemmaAuditor audit(audit_options);
    const OnlineRun run =
        run_online(instance, full ? OnlinePolicy::kFull : OnlinePolicy::kLightweight,
                   options, &audit);
    cell.reward = run.primal;
    cell.dual = run.dual;
    cell.growth = run.growth;
    cell.f_max = run.f_max;
    cell.bound = run.bound;
    cell.dual_ratio = run.primal > 0.0 ? run.dual / run.primal : 1.0;
    cell.lemmas = audit.counts();
    cell.duality_ok = run.primal <= run.dual + 1e-9 * (1.0 + std::abs(run.dual));
    // The dual-over-primal bound is a theorem for the full step; recorded
    // but not required for the lightweight split.
    cell.theorem_ok =
        !full || run.dual <= run.primal * run.bound + 1e-6 * run.primal;
    if (!audit.clean()) {
      cell.ok = false;
      cell.error = "lemma violations: " + audit.summary();
    }
    if (!cell.duality_ok || !cell.theorem_ok) {
      cell.ok = false;
      cell.error += " duality/theorem bound failed";
    }
    return cell;
  }

  if (is_baseline_algo(algo)) {
    const OnlineRun run = run_baseline(instance, baseline_from_name(algo), options);
    cell.reward = run.primal;
    cell.dual = run.dual;
    cell.growth = run.growth;
    cell.f_max = run.f_max;
    cell.bound = run.bound;
    cell.dual_ratio = run.primal > 0.0 ? run.dual / run.primal : 1.0;
    cell.feasibility_violations = check_baseline_feasibility(run, instance);
    cell.duality_ok = run.primal <= run.dual + 1e-9 * (1.0 + std::abs(run.dual));
    if (cell.feasibility_violations > 0) {
      cell.ok = false;
      cell.error = "baseline feasibility violations";
    }
    return cell;
  }

  cell.ok = false;
  cell.error = "unknown adversarial algorithm: " + algo;
  return cell;
}

StochasticAlgo stochastic_from_name(const std::string& algo) {
  if (algo == "do") return StochasticAlgo::kPlainDo;
  if (algo == "lightweight") return StochasticAlgo::kPlainLightweight;
  if (algo == "dlookahead") return StochasticAlgo::kDLookahead;
  return StochasticAlgo::kLfdo;
}

CellResult run_stochastic_cell(const ExperimentSpec& spec,
                               const std::string& algo, std::uint64_t seed) {
  CellResult cell;
  cell.algo = algo;
  cell.seed = seed;
  if (!(algo == "do" || algo == "lightweight" || algo == "lfdo" ||
        algo == "dlookahead")) {
    cell.ok = false;
    cell.error = "unknown stochastic algorithm: " + algo;
    return cell;
  }

  FrameConfig frame = spec.frame;
  frame.seed = seed;
  const StochasticInstance instance = generate_frames(frame);

  StochasticOptions options;
  options.v = spec.lfdo_v;
  options.engine = spec.lfdo_engine;
  options.solver = spec.solver;
  options.lookahead = spec.offline;
  options.benchmark_lookahead = spec.benchmark_lookahead && algo == "lfdo";

  LemmaAuditor::Options audit_options;
  audit_options.check_attainment = options.engine == OnlinePolicy::kFull;
  LemmaAuditor audit(audit_options);
  const bool audited = algo != "dlookahead";

  const StochasticRun run = run_stochastic(
      instance, stochastic_from_name(algo), options, audited ? &audit : nullptr);

  cell.reward = run.total_reward;
  cell.f_max = instance.f_max;
  cell.growth = growth_constant(instance.f_max);
  cell.bound = 3.0 + 1.0 / (cell.growth - 1.0);
  cell.avg_served = run.report.avg_served;
  cell.queue_over_k = run.report.queue_over_k;
  cell.queue_identity_residual = run.report.worst_violation_residual;
  cell.lemmas = audit.counts();

  for (size_t k = 0; k < run.lookahead_objective.size(); ++k) {
    const double slack = run.lookahead_objective[k] + run.lookahead_gap[k] +
                         1e-9 - run.frames[k].objective;
    if (slack < 0.0) ++cell.lookahead_dominance_violations;
  }

  if (audited && !audit.clean()) {
    cell.ok = false;
    cell.error = "lemma violations: " + audit.summary();
  }
  if (cell.queue_identity_residual > 1e-9) {
    cell.ok = false;
    cell.error += " queue identity failed";
  }
  if (cell.lookahead_dominance_violations > 0) {
    cell.ok = false;
    cell.error += " lookahead dominance failed";
  }

  if (spec.write_traces) {
    std::vector<std::string> header = {"k"};
    for (int n = 0; n < instance.num_users; ++n)
      header.push_back("Q" + std::to_string(n));
    for (int n = 0; n < instance.num_users; ++n)
      header.push_back("b" + std::to_string(n));
    header.push_back("P");
    header.push_back("V");
    CsvWriter frames_csv(cell_stem(spec, algo, seed) + "_frames.csv", header);
    for (const auto& fr : run.frames) {
      std::vector<std::string> row = {std::to_string(fr.frame)};
      for (double q : fr.queue_post) row.push_back(format_number(q));
      for (double b : fr.served) row.push_back(format_number(b));
      row.push_back(format_number(fr.reward));
      row.push_back(format_number(algo == "do" || algo == "lightweight"
                                      ? 0.0
                                      : options.v));
      frames_csv.row(row);
    }

    // Running-average timely throughput per user, ready to plot.
    CsvWriter series(cell_stem(spec, algo, seed) + "_throughput.dat",
                     [&] {
                       std::vector<std::string> h = {"k"};
                       for (int n = 0; n < instance.num_users; ++n)
                         h.push_back("avg_b" + std::to_string(n));
                       return h;
                     }());
    std::vector<double> cumulative(instance.num_users, 0.0);
    for (const auto& fr : run.frames) {
      std::vector<std::string> row = {std::to_string(fr.frame)};
      for (int n = 0; n < instance.num_users; ++n) {
        cumulative[n] += fr.served[n];
        row.push_back(format_number(cumulative[n] / (fr.frame + 1.0)));
      }
      series.row(row);
    }
  }
  return cell;
}

double median(std::vector<double> values) {
  if (values.empty()) return 0.0;
  std::sort(values.begin(), values.end());
  const size_t mid = values.size() / 2;
  if (values.size() % 2) return values[mid];
  return 0.5 * (values[mid - 1] + values[mid]);
}

double mean(const std::vector<double>& values) {
  if (values.empty()) return 0.0;
  double acc = 0.0;
  for (double v : values) acc += v;
  return acc / static_cast<double>(values.size());
}

}  // namespace

ExperimentSpec ExperimentSpec::parse_file(const std::string& path) {
  return parse(Config::from_file(path));
}

ExperimentSpec ExperimentSpec::parse(const Config& config) {
  ExperimentSpec spec;
  const std::string mode = config.get_or("mode", "adversarial");
  if (mode == "adversarial") {
    spec.mode = Mode::kAdversarial;
  } else if (mode == "stochastic") {
    spec.mode = Mode::kStochastic;
  } else {
    throw std::runtime_error("ExperimentSpec: unknown mode " + mode);
  }

  spec.algos = config.list("algos");
  if (spec.algos.empty())
    throw std::runtime_error("ExperimentSpec: need at least one algorithm");
  spec.seeds = config.seeds("seeds");
  if (spec.seeds.empty())
    throw std::runtime_error("ExperimentSpec: need at least one seed");

  spec.out_dir = config.get_or("out", "out");
  if (const char* root = std::getenv("DSCHED_OUT_ROOT"))
    spec.out_dir = std::string(root) + "/" + spec.out_dir;

  auto& sc = spec.scenario;
  sc.num_users = config.integer_or("scenario.users", sc.num_users);
  sc.horizon = config.integer_or("scenario.horizon", sc.horizon);
  sc.arrival_prob = config.number_or("scenario.p", sc.arrival_prob);
  sc.size_min = config.number_or("scenario.size_min", sc.size_min);
  sc.size_max = config.number_or("scenario.size_max", sc.size_max);
  sc.deadline_min = config.integer_or("scenario.deadline_min", sc.deadline_min);
  sc.deadline_max = config.integer_or("scenario.dmax", sc.deadline_max);
  sc.v_min = config.number_or("scenario.v_min", sc.v_min);
  sc.v_max = config.number_or("scenario.v_max", sc.v_max);
  sc.psi_min = config.number_or("scenario.psi_min", sc.psi_min);
  sc.psi_max = config.number_or("scenario.psi_max", sc.psi_max);
  sc.region_vertices = config.integer_or("scenario.region_samples", sc.region_vertices);
  if (config.has("scenario.rate_caps")) sc.rate_caps = config.numbers("scenario.rate_caps");
  else if (config.has("scenario.rate_cap"))
    sc.rate_caps.assign(sc.num_users, config.number("scenario.rate_cap"));

  auto& fr = spec.frame;
  fr.num_users = config.integer_or("frame.users", fr.num_users);
  fr.frame_len = config.integer_or("frame.len", fr.frame_len);
  fr.num_frames = config.integer_or("frame.count", fr.num_frames);
  fr.region_set_size = config.integer_or("frame.region_set", fr.region_set_size);
  fr.region_vertices = config.integer_or("frame.region_samples", fr.region_vertices);
  fr.normalize_peak_rates =
      config.flag_or("frame.normalize_peak_rates", fr.normalize_peak_rates);
  if (config.has("frame.rate_caps")) fr.rate_caps = config.numbers("frame.rate_caps");
  if (config.has("frame.delta")) fr.targets = config.numbers("frame.delta");
  for (const auto& name : config.children("frame.class")) {
    const std::string base = "frame.class." + name + ".";
    JobClass cls;
    cls.user = config.integer(base + "user");
    cls.size = config.number(base + "size");
    cls.deadline = config.integer(base + "deadline");
    cls.v = config.number_or(base + "v", cls.v);
    cls.psi = config.number_or(base + "psi", cls.psi);
    cls.arrival_prob = config.number_or(base + "p", cls.arrival_prob);
    fr.classes.push_back(cls);
  }

  spec.lfdo_v = config.number_or("lfdo.V", spec.lfdo_v);
  const std::string engine = config.get_or("lfdo.engine", "full");
  if (engine == "full") spec.lfdo_engine = OnlinePolicy::kFull;
  else if (engine == "lightweight") spec.lfdo_engine = OnlinePolicy::kLightweight;
  else throw std::runtime_error("ExperimentSpec: unknown lfdo.engine " + engine);

  spec.solver.gap_tol = config.number_or("tol.slot_gap", spec.solver.gap_tol);
  spec.solver.max_iterations =
      config.integer_or("tol.slot_max_iterations", spec.solver.max_iterations);
  spec.offline.tol = config.number_or("tol.offline", spec.offline.tol);
  spec.offline.max_outer = config.integer_or("tol.offline_max_outer", spec.offline.max_outer);
  spec.offline.max_inner = config.integer_or("tol.offline_max_inner", spec.offline.max_inner);
  spec.benchmark_lookahead =
      config.flag_or("lfdo.benchmark_lookahead", spec.benchmark_lookahead);
  spec.write_traces = config.flag_or("output.traces", spec.write_traces);
  spec.threads = config.integer_or("threads", spec.threads);
  return spec;
}

ExperimentResult run_experiment(const ExperimentSpec& spec) {
  ensure_directory(spec.out_dir);

  struct CellKey {
    std::uint64_t seed;
    std::string algo;
  };
  std::vector<CellKey> keys;
  for (const auto seed : spec.seeds)
    for (const auto& algo : spec.algos) keys.push_back({seed, algo});

  ExperimentResult result;
  result.cells.resize(keys.size());

  parallel_cells(spec.threads, static_cast<int>(keys.size()), [&](int i) {
    const auto& key = keys[i];
    try {
      result.cells[i] = (spec.mode == Mode::kAdversarial)
                            ? run_adversarial_cell(spec, key.algo, key.seed)
                            : run_stochastic_cell(spec, key.algo, key.seed);
    } catch (const SolverError& e) {
      CellResult cell;
      cell.algo = key.algo;
      cell.seed = key.seed;
      cell.ok = false;
      cell.error = std::string("solver: ") + e.what() + " residual=" +
                   format_number(e.residual());
      result.cells[i] = cell;
      result.cells[i].lemmas = LemmaCounts{};
      result.cells[i].dual_ratio = -1.0;  // marks a solver failure
    } catch (const std::exception& e) {
      CellResult cell;
      cell.algo = key.algo;
      cell.seed = key.seed;
      cell.ok = false;
      cell.error = e.what();
      result.cells[i] = cell;
    }
  });

  // Summaries, deterministically ordered by (seed, algo) listing order.
  CsvWriter summary(spec.out_dir + "/summary.csv", kSummaryHeader);
  for (const auto& cell : result.cells) write_adversarial_summary(summary, cell);

  // Per-algorithm aggregate.
  CsvWriter aggregate(spec.out_dir + "/aggregate.csv",
                      {"algo", "runs", "median_reward", "mean_reward",
                       "median_D_over_P", "violations", "failures"});
  for (const auto& algo : spec.algos) {
    std::vector<double> rewards, ratios;
    long violations = 0, failures = 0;
    for (const auto& cell : result.cells) {
      if (cell.algo != algo) continue;
      rewards.push_back(cell.reward);
      ratios.push_back(cell.dual_ratio);
      violations += cell.lemmas.total() + cell.feasibility_violations +
                    cell.lookahead_dominance_violations;
      if (!cell.ok) ++failures;
    }
    aggregate.row({algo, std::to_string(rewards.size()),
                   format_number(median(rewards)), format_number(mean(rewards)),
                   format_number(median(ratios)), std::to_string(violations),
                   std::to_string(failures)});
  }

  for (const auto& cell : result.cells) {
    if (cell.ok) continue;
    result.problems.push_back(cell.algo + " seed " + std::to_string(cell.seed) +
                              ": " + cell.error);
    const bool solver_failure = cell.error.rfind("solver:", 0) == 0;
    result.exit_code = std::max(result.exit_code, solver_failure ? 3 : 2);
  }
  return result;
}

ExperimentResult sweep(const ExperimentSpec& spec, const std::string& param,
                       const std::vector<double>& values) {
  if (param != "p" && param != "D_max" && param != "V" && param != "delta")
    throw std::runtime_error("sweep: unknown parameter " + param);
  ensure_directory(spec.out_dir);

  ExperimentResult combined;
  CsvWriter table(spec.out_dir + "/sweep.csv",
                  {"param", "value", "algo", "runs", "median_reward",
                   "mean_reward", "median_D_over_P"});

  for (const double value : values) {
    ExperimentSpec local = spec;
    std::ostringstream dir;
    dir << spec.out_dir << "/" << param << "=" << format_number(value);
    local.out_dir = dir.str();
    if (param == "p") local.scenario.arrival_prob = value;
    if (param == "D_max") local.scenario.deadline_max = static_cast<int>(value);
    if (param == "V") local.lfdo_v = value;
    if (param == "delta") {
      for (double& d : local.frame.targets)
        if (d > 0.0) d = value;
    }

    const ExperimentResult step = run_experiment(local);
    for (const auto& algo : local.algos) {
      std::vector<double> rewards, ratios;
      for (const auto& cell : step.cells) {
        if (cell.algo != algo) continue;
        rewards.push_back(cell.reward);
        ratios.push_back(cell.dual_ratio);
      }
      table.row({param, format_number(value), algo,
                 std::to_string(rewards.size()), format_number(median(rewards)),
                 format_number(mean(rewards)), format_number(median(ratios))});
    }
    combined.cells.insert(combined.cells.end(), step.cells.begin(),
                          step.cells.end());
    combined.exit_code = std::max(combined.exit_code, step.exit_code);
    combined.problems.insert(combined.problems.end(), step.problems.begin(),
                             step.problems.end());
  }
  return combined;
}

CellResult replay(const std::string& instance_path, const std::string& algo,
                  const ExperimentSpec& spec) {
  const Instance instance = load_instance(instance_path);
  ensure_directory(spec.out_dir);

  CellResult cell;
  cell.algo = algo;
  cell.seed = 0;
  RunOptions options;
  options.solver = spec.solver;

  if (is_online_algo(algo)) {
    LemmaAuditor::Options audit_options;
    audit_options.check_attainment = algo == "do";
    LemmaAuditor audit(audit_options);
    const OnlineRun run = run_online(
        instance, algo == "do" ? OnlinePolicy::kFull : OnlinePolicy::kLightweight,
        options, &audit);
    cell.reward = run.primal;
    cell.dual = run.dual;
    cell.growth = run.growth;
    cell.f_max = run.f_max;
    cell.bound = run.bound;
    cell.dual_ratio = run.primal > 0.0 ? run.dual / run.primal : 1.0;
    cell.lemmas = audit.counts();
    cell.ok = audit.clean();
  } else if (is_baseline_algo(algo)) {
    const OnlineRun run = run_baseline(instance, baseline_from_name(algo), options);
    cell.reward = run.primal;
    cell.dual = run.dual;
    cell.f_max = run.f_max;
    cell.feasibility_violations = check_baseline_feasibility(run, instance);
    cell.ok = cell.feasibility_violations == 0;
  } else if (algo == "offline") {
    const OfflineSolution sol = offline_solve(instance, spec.offline);
    cell.reward = sol.objective;
    cell.offline_objective = sol.objective;
    cell.offline_gap = sol.gap;
    cell.ok = sol.converged;
  } else {
    throw std::runtime_error("replay: unknown algorithm " + algo);
  }

  CsvWriter summary(spec.out_dir + "/replay_summary.csv", kSummaryHeader);
  write_adversarial_summary(summary, cell);
  return cell;
}

bool ValidationReport::all_pass() const {
  for (const auto& item : items)
    if (!item.pass) return false;
  return true;
}

std::vector<Instance> make_tiny_instances(int count, std::uint64_t seed0) {
  std::vector<Instance> out;
  out.reserve(count);
  const double h = kTinyGridStep;
  for (int i = 0; i < count; ++i) {
    Rng rng(seed0 + static_cast<std::uint64_t>(i));
    Instance instance;
    instance.num_users = 1 + static_cast<int>(rng.below(2));
    instance.horizon = 2 + static_cast<int>(rng.below(2));  // 2..3 slots
    const int num_jobs = 1 + static_cast<int>(rng.below(3));
    const int num_vertices = 1 + static_cast<int>(rng.below(3));

    for (int j = 0; j < num_jobs; ++j) {
      Job job;
      job.id = j;
      job.arrival = static_cast<int>(rng.below(instance.horizon));
      job.deadline = job.arrival +
                     static_cast<int>(rng.below(instance.horizon - job.arrival));
      // Sizes on the oracle grid, within [0.5, 2].
      job.size = h * static_cast<double>(10 + rng.below(31));
      job.user = static_cast<int>(rng.below(instance.num_users));
      job.utility = PowerUtility(rng.uniform(0.2, 1.0), rng.uniform(0.2, 0.8));
      instance.jobs.push_back(job);
    }
    for (int t = 0; t < instance.horizon; ++t) {
      std::vector<std::vector<double>> verts(
          num_vertices, std::vector<double>(instance.num_users));
      for (auto& v : verts)
        for (double& c : v)
          c = h * static_cast<double>(rng.below(21));  // grid-aligned, <= 1
      instance.regions.emplace_back(instance.num_users, std::move(verts));
    }
    instance.f_max = measure_f_max(instance.jobs, instance.regions);
    out.push_back(std::move(instance));
  }
  return out;
}

ValidationReport validate(const ExperimentSpec& spec) {
  ValidationReport report;
  auto add = [&](const std::string& name, bool pass, double residual,
                 const std::string& detail = "") {
    report.items.push_back(ValidationItem{name, pass, residual, detail});
  };

  // Numerics identities over sampled utilities.
  {
    Rng rng(7);
    double worst_fd = 0.0, worst_pair = 0.0, worst_conj = 0.0, worst_norm = 0.0;
    bool bound_ok = true;
    for (int i = 0; i < 200; ++i) {
      const PowerUtility f(rng.uniform(0.05, 1.0), rng.uniform(0.02, 0.98));
      worst_norm = std::max(worst_norm, std::abs(f.eval(0.0)));
      for (const double x : {0.01, 0.1, 1.0, 10.0}) {
        const double hstep = 1e-5;
        const double fd = (f.eval(x + hstep) - f.eval(x - hstep)) / (2 * hstep);
        worst_fd = std::max(worst_fd, std::abs(f.grad(x) - fd));
        const double alpha = f.grad(x);
        worst_pair = std::max(
            worst_pair, std::abs(f.eval(x) + f.conjugate(alpha) - x * alpha));
        if (f.conjugate(f.grad(x)) < -f.eval(x) - 1e-9) bound_ok = false;
      }
      const double alpha = rng.uniform(0.05, 3.0);
      const double closed = f.conjugate(alpha);
      for (int k = 0; k <= 1000; ++k) {
        const double x = 20.0 * k / 1000.0;
        worst_conj = std::max(worst_conj, closed - (alpha * x - f.eval(x)));
      }
      if (alpha < f.grad(0.0)) {
        const double xstar = f.inverse_grad(alpha);
        worst_conj = std::max(
            worst_conj, std::abs(closed - (alpha * xstar - f.eval(xstar))));
      }
    }
    add("numerics.normalization", worst_norm == 0.0, worst_norm);
    add("numerics.gradient_fd", worst_fd <= 1e-6, worst_fd);
    add("numerics.conjugate_grid", worst_conj <= 1e-6, worst_conj);
    add("numerics.complementary_pair", worst_pair <= 1e-6, worst_pair);
    add("numerics.conjugate_bound", bound_ok, 0.0);
  }

  // Region oracle optimality and membership.
  {
    Rng rng(11);
    bool ok = true;
    double worst = 0.0;
    for (int i = 0; i < 50 && ok; ++i) {
      const int users = 2 + static_cast<int>(rng.below(3));
      std::vector<double> caps(users, 1.0);
      RateRegion region = sample_region(users, 1 + static_cast<int>(rng.below(6)),
                                        caps, rng);
      std::vector<double> coeffs(users);
      for (double& c : coeffs) c = rng.uniform(-1.0, 2.0);
      const auto lm = region.linear_max(coeffs);
      if (!region.contains(lm.rates, 1e-9)) ok = false;
      for (int p = 0; p < 20; ++p) {
        // Random feasible point: scaled convex combination of vertices.
        std::vector<double> x(users, 0.0);
        double total = 0.0;
        std::vector<double> lambda(region.vertices().size());
        for (double& l : lambda) {
          l = rng.uniform01();
          total += l;
        }
        const double shrink = rng.uniform01() / std::max(total, 1e-12);
        for (size_t vtx = 0; vtx < lambda.size(); ++vtx)
          for (int n = 0; n < users; ++n)
            x[n] += lambda[vtx] * shrink * region.vertices()[vtx][n];
        double value = 0.0;
        for (int n = 0; n < users; ++n)
          if (coeffs[n] > 0.0) value += coeffs[n] * x[n];
        worst = std::max(worst, value - lm.objective);
      }
    }
    add("region.oracle_optimality", ok && worst <= 1e-9, worst);
  }

  // Online lemma battery plus duality bounds on the default scenario.
  {
    ExperimentSpec local = spec;
    local.mode = Mode::kAdversarial;
    local.algos = {"do", "lightweight"};
    if (local.seeds.size() > 20) local.seeds.resize(20);
    local.write_traces = false;
    local.out_dir = spec.out_dir + "/validate_online";
    const ExperimentResult result = run_experiment(local);
    long violations = 0;
    bool duality = true, theorem = true;
    for (const auto& cell : result.cells) {
      violations += cell.lemmas.total();
      duality = duality && cell.duality_ok;
      theorem = theorem && cell.theorem_ok;
    }
    add("online.lemmas", violations == 0, static_cast<double>(violations));
    add("online.weak_duality", duality, 0.0);
    add("online.dual_bound", theorem, 0.0);
  }

  // Negative control: a corrupted beta recursion must trip the audit.
  {
    ScenarioConfig scenario = spec.scenario;
    scenario.seed = 12345;
    scenario.horizon = std::min(scenario.horizon, 30);
    const Instance instance = generate_instance(scenario);
    SchedulerState state(instance.jobs, {}, instance.f_max);
    LemmaAuditor audit;
    std::vector<int> active;
    for (int t = 0; t < instance.horizon; ++t) {
      active.clear();
      for (size_t j = 0; j < instance.jobs.size(); ++j)
        if (instance.jobs[j].active_at(t)) active.push_back(static_cast<int>(j));
      audit.begin_slot(state);
      SlotDecision d = do_step(state, active, instance.regions[t], spec.solver);
      d.slot = t;
      audit.after_decision(state, d, instance.regions[t], active);
      beta_update(state, d);
      state.debug_scale_beta(0.5);  // corrupt
      audit.after_beta(state, d);
    }
    add("online.negative_control", audit.counts().beta_floor > 0,
        static_cast<double>(audit.counts().beta_floor));
  }

  // Offline solver against the exhaustive grid oracle.
  {
    const auto tiny = make_tiny_instances(8, 500);
    double worst = 0.0, worst_gap = 0.0;
    bool ok = true;
    for (const auto& instance : tiny) {
      OfflineOptions options;
      options.tol = 1e-4;
      const OfflineSolution exact = offline_solve(instance, options);
      const OfflineSolution grid = brute_force_solve(instance, kTinyGridStep);
      const double diff = std::abs(exact.objective - grid.objective);
      worst = std::max(worst, diff / (1.0 + std::abs(exact.objective)));
      worst_gap = std::max(worst_gap, exact.gap / (1.0 + exact.objective));
      if (diff > 0.01 * (1.0 + std::abs(exact.objective))) ok = false;
    }
    add("offline.brute_force_agreement", ok, worst);
    add("offline.certified_gap", worst_gap <= 1e-3, worst_gap);
  }

  // Queue recursion identities on random sequences.
  {
    Rng rng(23);
    double worst = 0.0;
    for (int trial = 0; trial < 50; ++trial) {
      const int users = 1 + static_cast<int>(rng.below(4));
      std::vector<double> targets(users);
      for (double& d : targets) d = rng.uniform(0.0, 1.0);
      VirtualQueue queue(targets);
      std::vector<double> sum(users, 0.0);
      const int frames = 40;
      for (int k = 1; k <= frames; ++k) {
        std::vector<double> served(users);
        for (double& b : served) b = rng.uniform(0.0, 1.5);
        for (int n = 0; n < users; ++n) sum[n] += served[n];
        queue.update(served);
        for (int n = 0; n < users; ++n) {
          if (queue.length(n) < 0.0) worst = std::max(worst, -queue.length(n));
          const double lhs = queue.length(n) / k;
          const double rhs = targets[n] - sum[n] / k;
          worst = std::max(worst, rhs - lhs);
        }
      }
    }
    add("stochastic.queue_identity", worst <= 1e-12, worst);
  }

  // Determinism: identical cells give bit-identical results.
  {
    ScenarioConfig scenario = spec.scenario;
    scenario.seed = 99;
    scenario.horizon = std::min(scenario.horizon, 50);
    const Instance a = generate_instance(scenario);
    const Instance b = generate_instance(scenario);
    RunOptions options;
    options.solver = spec.solver;
    options.keep_decisions = false;
    const OnlineRun ra = run_online(a, OnlinePolicy::kFull, options);
    const OnlineRun rb = run_online(b, OnlinePolicy::kFull, options);
    const bool same = ra.primal == rb.primal && ra.dual == rb.dual &&
                      a.f_max == b.f_max;
    add("harness.determinism", same, std::abs(ra.primal - rb.primal));
  }

  return report;
}

}  // namespace dsched
