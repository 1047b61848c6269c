// bsccat: run cat-state protocols from a JSON config and emit reports.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "bsc/runner.hpp"

namespace {

struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> trials;
  std::optional<int> workers;
  std::optional<double> norm_tol;
  std::optional<double> fid_tol;
  std::optional<double> leak_tol;
};

void apply(const Overrides& o, bsc::RunConfig& c) {
  if (o.seed) c.seed = *o.seed;
  if (o.trials) c.trials = *o.trials;
  if (o.workers) c.workers = *o.workers;
  if (o.norm_tol) c.tolerances.norm = *o.norm_tol;
  if (o.fid_tol) c.tolerances.fidelity = *o.fid_tol;
  if (o.leak_tol) c.tolerances.leakage = *o.leak_tol;
  // Re-validate so overrides obey the same rules as the file.
  c = bsc::parse_config(bsc::serialize_config(c));
}

nlohmann::json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw bsc::Error("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return nlohmann::json::parse(ss.str());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Binomial cat-state protocol simulator"};
  app.require_subcommand(1);

  Overrides ov;
  std::string config_path, report_path, out_dir = "bsc_out";

  auto* run_cmd = app.add_subcommand("run", "Execute the protocol described by a config file");
  run_cmd->add_option("config", config_path, "JSON config")->required()->check(CLI::ExistingFile);
  run_cmd->add_option("--out", out_dir, "Output directory");
  run_cmd->add_option("--seed", ov.seed, "Override the RNG seed");
  run_cmd->add_option("--trials", ov.trials, "Override the sampling trial count")->check(CLI::PositiveNumber);
  run_cmd->add_option("--workers", ov.workers, "Cap the worker thread count (0 = default)")
      ->check(CLI::NonNegativeNumber);
  run_cmd->add_option("--norm-tol", ov.norm_tol, "Norm drift tolerance");
  run_cmd->add_option("--fid-tol", ov.fid_tol, "Fidelity tolerance");
  run_cmd->add_option("--leak-tol", ov.leak_tol, "Fock truncation leakage tolerance");

  auto* replay_cmd = app.add_subcommand("replay", "Re-run the config echoed in a report and compare");
  replay_cmd->add_option("report", report_path, "report.json")->required()->check(CLI::ExistingFile);
  std::string replay_out;
  replay_cmd->add_option("--out", replay_out, "Also write the regenerated outputs here");

  bsc::TimingSearch ts;
  auto* timing_cmd = app.add_subcommand("timing", "Solve the joint timing conditions");
  timing_cmd->add_option("--gt-min", ts.gt_min);
  timing_cmd->add_option("--gt-max", ts.gt_max);
  timing_cmd->add_option("--tolerance", ts.tolerance);
  std::string scan_path;
  timing_cmd->add_option("--scan", scan_path, "Write a residual scan CSV here");

  bsc::FeasibilityBudget budget;
  auto* feas_cmd = app.add_subcommand("feasibility", "Compare lifetimes with the interaction time");
  feas_cmd->add_option("--tau-at", budget.tau_at, "Atomic lifetime [s]")->required();
  feas_cmd->add_option("--tau-cav", budget.tau_cav, "Cavity lifetime [s]")->required();
  feas_cmd->add_option("--T", budget.max_interaction_time, "Interaction time [s]")->required();
  feas_cmd->add_option("--total", budget.total_sequence_time, "Total sequence time [s]");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run_cmd) {
      bsc::RunConfig c = bsc::load_config(config_path);
      apply(ov, c);
      const auto out = bsc::run(c);
      bsc::write_outputs(out, out_dir);
      for (const auto& b : out.breaches) std::cerr << "invariant breach: " << b << "\n";
      std::cout << "wrote " << out_dir << "/report.json (" << out.report["status"].get<std::string>() << ")\n";
      return out.ok() ? 0 : 3;
    }
    if (*replay_cmd) {
      const auto report = read_json(report_path);
      const auto diffs = bsc::replay_differences(report);
      if (!replay_out.empty()) bsc::write_outputs(bsc::run(bsc::parse_config(report.at("config"))), replay_out);
      if (diffs.empty()) {
        std::cout << "replay identical\n";
        return 0;
      }
      for (const auto& d : diffs) std::cerr << "differs: " << d << "\n";
      return 4;
    }
    if (*timing_cmd) {
      nlohmann::json sols = nlohmann::json::array();
      for (const auto& s : bsc::solve_joint_timing(ts)) sols.push_back(bsc::to_json(s));
      std::cout << sols.dump(2) << "\n";
      if (!scan_path.empty()) {
        std::ofstream(scan_path) << bsc::timing_scan_csv(ts, 0.01);
      }
      return 0;
    }
    if (*feas_cmd) {
      const auto r = bsc::feasibility_check(budget);
      std::cout << bsc::to_json(r).dump(2) << "\n";
      return r.pass ? 0 : 1;
    }
  } catch (const bsc::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
