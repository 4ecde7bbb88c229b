#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "dsched/csv.hpp"
#include "dsched/experiment.hpp"

using namespace dsched;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  REQUIRE(in);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

std::string temp_dir(const std::string& tag) {
  const auto dir =
      std::filesystem::temp_directory_path() / ("dsched_test_" + tag);
  std::filesystem::remove_all(dir);
  return dir.string();
}

}  // namespace

TEST_CASE("config parsing: values, lists, ranges, sections") {
  const auto config = Config::from_string(
      "mode = adversarial   # trailing comment\n"
      "\n"
      "scenario.p=0.35\n"
      "seeds=1..4,9\n"
      "algos=do, lightweight ,edd\n"
      "frame.class.0.user=1\n"
      "frame.class.1.user=0\n"
      "flag=true\n");
  CHECK(config.get("mode") == "adversarial");
  CHECK(config.number("scenario.p") == doctest::Approx(0.35));
  CHECK(config.seeds("seeds") ==
        std::vector<std::uint64_t>{1, 2, 3, 4, 9});
  CHECK(config.list("algos") ==
        std::vector<std::string>{"do", "lightweight", "edd"});
  CHECK(config.children("frame.class") ==
        std::vector<std::string>{"0", "1"});
  CHECK(config.flag_or("flag", false));
  CHECK(config.integer_or("missing", 7) == 7);
  CHECK_THROWS(config.get("missing"));
  CHECK_THROWS(Config::from_string("novalue\n"));
}

TEST_CASE("csv numbers carry 12 significant digits") {
  CHECK(format_number(1.0) == "1");
  CHECK(format_number(0.3333333333333333) == "0.333333333333");
  CHECK(format_number(123456789012345.0) == "1.23456789012e+14");
}

TEST_CASE("experiment: empty workload earns zero everywhere") {
  ExperimentSpec spec;
  spec.mode = Mode::kAdversarial;
  spec.algos = {"do", "lightweight", "edd", "greedy", "primal"};
  spec.seeds = {1, 2};
  spec.scenario.arrival_prob = 0.0;
  spec.scenario.horizon = 20;
  spec.out_dir = temp_dir("zero");
  spec.write_traces = false;

  const auto result = run_experiment(spec);
  CHECK(result.exit_code == 0);
  for (const auto& cell : result.cells) {
    CHECK(cell.ok);
    CHECK(cell.reward == 0.0);
  }
}

TEST_CASE("experiment artifacts are byte-identical across runs") {
  ExperimentSpec spec;
  spec.mode = Mode::kAdversarial;
  spec.algos = {"do", "greedy"};
  spec.seeds = {5, 6, 7};
  spec.scenario.horizon = 40;
  spec.write_traces = true;

  spec.out_dir = temp_dir("det_a");
  REQUIRE(run_experiment(spec).exit_code == 0);
  const std::string first = slurp(spec.out_dir + "/summary.csv");
  const std::string first_trace = slurp(spec.out_dir + "/do_seed5_trace.csv");

  spec.out_dir = temp_dir("det_b");
  REQUIRE(run_experiment(spec).exit_code == 0);
  CHECK(slurp(spec.out_dir + "/summary.csv") == first);
  CHECK(slurp(spec.out_dir + "/do_seed5_trace.csv") == first_trace);
}

TEST_CASE("experiment flags violations with exit code 2") {
  // Unreachable target: the queue identity still holds, so this stays
  // clean; instead corrupt via an unknown algorithm name.
  ExperimentSpec spec;
  spec.mode = Mode::kAdversarial;
  spec.algos = {"nonsense"};
  spec.seeds = {1};
  spec.scenario.horizon = 10;
  spec.out_dir = temp_dir("bad");
  spec.write_traces = false;
  const auto result = run_experiment(spec);
  CHECK(result.exit_code == 2);
  CHECK_FALSE(result.problems.empty());
}

TEST_CASE("replay reproduces a generated instance byte for byte") {
  ScenarioConfig scenario;
  scenario.seed = 123;
  scenario.horizon = 30;
  const Instance instance = generate_instance(scenario);
  const std::string dir = temp_dir("replay");
  ensure_directory(dir);
  const std::string path = dir + "/instance.txt";
  save_instance(instance, path);

  ExperimentSpec spec;
  spec.out_dir = dir;
  const CellResult cell = replay(path, "do", spec);
  CHECK(cell.ok);

  const Instance loaded = load_instance(path);
  const OnlineRun direct = run_online(loaded, OnlinePolicy::kFull, {});
  CHECK(cell.reward == direct.primal);
  CHECK(cell.dual == direct.dual);
}

TEST_CASE("sweep emits one aggregate row per value and algorithm") {
  ExperimentSpec spec;
  spec.mode = Mode::kAdversarial;
  spec.algos = {"do", "edd"};
  spec.seeds = {1, 2};
  spec.scenario.horizon = 30;
  spec.out_dir = temp_dir("sweep");
  spec.write_traces = false;

  const auto result = sweep(spec, "p", {0.1, 0.5});
  CHECK(result.exit_code == 0);
  const std::string table = slurp(spec.out_dir + "/sweep.csv");
  CHECK(table.find("p,0.1,do") != std::string::npos);
  CHECK(table.find("p,0.5,edd") != std::string::npos);
  CHECK_THROWS(sweep(spec, "bogus", {1.0}));
}

TEST_CASE("spec parsing from flat keys") {
  const auto config = Config::from_string(
      "mode=stochastic\n"
      "algos=lfdo\n"
      "seeds=1\n"
      "out=parse_check\n"
      "frame.users=2\n"
      "frame.len=4\n"
      "frame.count=12\n"
      "frame.delta=0.2,0\n"
      "frame.rate_caps=0.3,0.3\n"
      "frame.class.0.user=0\n"
      "frame.class.0.size=1.5\n"
      "frame.class.0.deadline=4\n"
      "lfdo.V=0.25\n"
      "tol.slot_gap=1e-8\n");
  const auto spec = ExperimentSpec::parse(config);
  CHECK(spec.mode == Mode::kStochastic);
  CHECK(spec.frame.num_users == 2);
  CHECK(spec.frame.classes.size() == 1);
  CHECK(spec.frame.classes[0].size == doctest::Approx(1.5));
  CHECK(spec.frame.targets == std::vector<double>{0.2, 0.0});
  CHECK(spec.lfdo_v == doctest::Approx(0.25));
  CHECK(spec.solver.gap_tol == doctest::Approx(1e-8));
}

TEST_CASE("validation suite passes on the default spec") {
  ExperimentSpec spec;
  spec.seeds = {1, 2, 3, 4};
  spec.scenario.horizon = 50;
  spec.out_dir = temp_dir("validate");
  spec.write_traces = false;
  const auto report = validate(spec);
  for (const auto& item : report.items) {
    INFO(item.name, " residual=", item.residual);
    CHECK(item.pass);
  }
}
