#include <cstdio>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "dsched/csv.hpp"
#include "dsched/experiment.hpp"

namespace {

void print_problems(const dsched::ExperimentResult& result) {
  for (const auto& problem : result.problems)
    std::cerr << "violation: " << problem << "\n";
}

void print_cells(const dsched::ExperimentResult& result) {
  for (const auto& cell : result.cells) {
    std::cout << cell.algo << " seed=" << cell.seed
              << " reward=" << dsched::format_number(cell.reward);
    if (cell.dual > 0.0)
      std::cout << " D=" << dsched::format_number(cell.dual)
                << " D/P=" << dsched::format_number(cell.dual_ratio);
    if (!cell.ok) std::cout << "  [" << cell.error << "]";
    std::cout << "\n";
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Online primal-dual scheduling of deadline-constrained jobs "
               "over time-varying rate regions"};
  app.require_subcommand(1);

  std::string spec_path;
  std::string param;
  std::string values_csv;
  std::string instance_path;
  std::string algo = "do";
  bool quiet = false;
  app.add_flag("-q,--quiet", quiet, "suppress per-cell output");

  auto* run_cmd = app.add_subcommand("run", "run every (seed, algorithm) cell");
  run_cmd->add_option("spec", spec_path, "experiment spec file")->required();

  auto* sweep_cmd = app.add_subcommand("sweep", "re-run while varying one parameter");
  sweep_cmd->add_option("spec", spec_path, "experiment spec file")->required();
  sweep_cmd->add_option("--param", param, "one of p, D_max, V, delta")->required();
  sweep_cmd->add_option("--values", values_csv, "comma-separated values")->required();

  auto* validate_cmd = app.add_subcommand("validate", "run the invariant suites");
  validate_cmd->add_option("spec", spec_path, "experiment spec file")->required();

  auto* replay_cmd = app.add_subcommand("replay", "re-run a serialized instance");
  replay_cmd->add_option("instance", instance_path, "instance file")->required();
  replay_cmd->add_option("--algo", algo, "algorithm to run")->required();
  replay_cmd->add_option("--spec", spec_path, "optional spec for tolerances");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run_cmd->parsed()) {
      const auto spec = dsched::ExperimentSpec::parse_file(spec_path);
      const auto result = dsched::run_experiment(spec);
      if (!quiet) print_cells(result);
      print_problems(result);
      std::cout << "artifacts: " << spec.out_dir << "\n";
      return result.exit_code;
    }
    if (sweep_cmd->parsed()) {
      const auto spec = dsched::ExperimentSpec::parse_file(spec_path);
      std::vector<double> values;
      {
        dsched::Config tmp;
        tmp.set("values", values_csv);
        values = tmp.numbers("values");
      }
      const auto result = dsched::sweep(spec, param, values);
      print_problems(result);
      std::cout << "artifacts: " << spec.out_dir << "/sweep.csv\n";
      return result.exit_code;
    }
    if (validate_cmd->parsed()) {
      const auto spec = dsched::ExperimentSpec::parse_file(spec_path);
      const auto report = dsched::validate(spec);
      for (const auto& item : report.items) {
        std::printf("[%s] %-32s residual=%.3g %s\n",
                    item.pass ? "PASS" : "FAIL", item.name.c_str(),
                    item.residual, item.detail.c_str());
      }
      return report.all_pass() ? 0 : 2;
    }
    if (replay_cmd->parsed()) {
      dsched::ExperimentSpec spec;
      if (!spec_path.empty()) spec = dsched::ExperimentSpec::parse_file(spec_path);
      spec.out_dir = "replay_out";
      const auto cell = dsched::replay(instance_path, algo, spec);
      std::cout << algo << " reward=" << dsched::format_number(cell.reward)
                << " D=" << dsched::format_number(cell.dual)
                << (cell.ok ? "" : "  [" + cell.error + "]") << "\n";
      return cell.ok ? 0 : 2;
    }
  } catch (const dsched::SolverError& e) {
    std::cerr << "solver failure: " << e.what()
              << " residual=" << e.residual() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
