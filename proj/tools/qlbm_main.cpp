// Command-line driver: quantum, classical, and analytic runs plus the
// comparison and reinitialization-study experiments.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "qlbm/harness.hpp"

namespace fs = std::filesystem;
using namespace qlbm;

namespace {

struct CommonOpts {
  std::string config_path;
  std::string out_dir;
  std::string backend;
  std::optional<int> steps;
  std::optional<std::uint64_t> seed;
};

void add_common(CLI::App* cmd, CommonOpts& o) {
  cmd->add_option("--config", o.config_path, "JSON config file");
  cmd->add_option("--out", o.out_dir, "output directory root");
  cmd->add_option("--backend", o.backend, "simulator backend")
      ->check(CLI::IsMember({"statevector", "mps"}));
  cmd->add_option("--steps", o.steps, "number of time steps");
  cmd->add_option("--seed", o.seed, "random seed (shot mode)");
}

SimConfig load_config(const CommonOpts& o) {
  SimConfig cfg = o.config_path.empty() ? SimConfig{} : SimConfig::from_json_file(o.config_path);
  if (!o.out_dir.empty()) cfg.out_dir = o.out_dir;
  if (!o.backend.empty()) {
    cfg.backend = o.backend == "mps" ? BackendKind::Mps : BackendKind::Statevector;
  }
  if (o.steps) cfg.n_steps = *o.steps;
  if (o.seed) cfg.seed = *o.seed;
  cfg.validate();
  return cfg;
}

fs::path make_run_dir(const SimConfig& cfg) {
  const fs::path dir = output_root(cfg) / cfg.config_hash();
  fs::create_directories(dir);
  std::ofstream out(dir / "config.json");
  out << cfg.to_json_text() << "\n";
  return dir;
}

int cmd_run_qlbm(const SimConfig& cfg) {
  const fs::path dir = make_run_dir(cfg);
  const HybridResult res = run_hybrid(cfg.hybrid(), cfg.n_steps);
  write_run_csvs(dir, "qlbm_", res.steps);
  std::printf("wrote %s (reinits %d, truncation %.3e, backend %s)\n",
              dir.string().c_str(), res.reinit_count,
              res.steps.back().truncation_error,
              res.used_mps ? "mps" : "statevector");
  return 0;
}

int cmd_run_classical(const SimConfig& cfg) {
  const fs::path dir = make_run_dir(cfg);
  const auto series = run(cfg.params, cfg.n_steps);
  write_classical_csvs(dir, "classical_", series);
  std::printf("wrote %s\n", dir.string().c_str());
  return 0;
}

int cmd_run_analytic(const SimConfig& cfg) {
  const fs::path dir = make_run_dir(cfg);
  const AnalyticReference ref = analytic_reference(cfg);
  std::vector<std::vector<double>> rows;
  for (int t = 0; t <= cfg.n_steps; ++t) {
    rows.push_back({static_cast<double>(t), ref.interface_x[t]});
  }
  write_csv(dir / "analytic_interface.csv", {"t", "x_I"}, rows);
  std::printf("lambda %.12f (residual %.3e), wrote %s\n", ref.lambda.lambda,
              ref.lambda.residual, dir.string().c_str());
  return 0;
}

int cmd_compare(const SimConfig& cfg) {
  const ExperimentSummary s = run_experiment(cfg);
  std::printf("max RMS(T) %.6e, RMS(x_I) %.6e, classical-vs-analytic max |dx_I| %.4f\n",
              s.max_rms_T, s.rms_xI, s.classical_vs_analytic_max_xI_err);
  std::printf("wrote %s\n", s.run_dir.string().c_str());
  return 0;
}

int cmd_reinit_study(const SimConfig& cfg) {
  const ReinitStudySummary s = compare_reinit_schedules(cfg);
  std::printf("interval 1 : RMS(x_I) %.6e, reinits %d\n", s.interval_1.rms_xI,
              s.interval_1.reinit_count);
  std::printf("interval 12: RMS(x_I) %.6e, reinits %d\n", s.interval_12.rms_xI,
              s.interval_12.reinit_count);
  std::printf("final field RMS diff %.6e\n", s.final_field_rms_diff);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"1D melting-front lattice Boltzmann simulator (quantum-circuit and classical)"};
  app.require_subcommand(1);

  CommonOpts opts;
  auto* qlbm_cmd = app.add_subcommand("run-qlbm", "quantum-circuit pipeline");
  auto* classical_cmd = app.add_subcommand("run-classical", "classical reference solver");
  auto* analytic_cmd = app.add_subcommand("run-analytic", "closed-form interface trajectory");
  auto* compare_cmd = app.add_subcommand("compare", "quantum vs classical vs analytic");
  auto* reinit_cmd = app.add_subcommand("reinit-study", "reinitialization interval study");
  for (auto* c : {qlbm_cmd, classical_cmd, analytic_cmd, compare_cmd, reinit_cmd}) {
    add_common(c, opts);
  }

  CLI11_PARSE(app, argc, argv);

  try {
    SimConfig cfg;
    try {
      cfg = load_config(opts);
    } catch (const std::invalid_argument& e) {
      std::cerr << "validation error: " << e.what() << "\n";
      return 2;
    }
    if (qlbm_cmd->parsed()) return cmd_run_qlbm(cfg);
    if (classical_cmd->parsed()) return cmd_run_classical(cfg);
    if (analytic_cmd->parsed()) return cmd_run_analytic(cfg);
    if (compare_cmd->parsed()) return cmd_compare(cfg);
    if (reinit_cmd->parsed()) return cmd_reinit_study(cfg);
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "runtime failure: " << e.what() << "\n";
    return 3;
  }
}
