#pragma once
// Configuration loading, experiment orchestration (quantum vs classical vs
// analytic), error metrics, and CSV persistence.

#include <filesystem>
#include <string>
#include <vector>

#include "qlbm/classical_lbm.hpp"
#include "qlbm/hybrid.hpp"
#include "qlbm/stefan.hpp"

namespace qlbm {

struct SimConfig {
  Params params;  // defaults reproduce the reference run (17 sites, etc.)
  int n_steps = 110;
  BackendKind backend = BackendKind::Auto;
  int statevector_cap = 26;
  int chi_max = 64;
  double sv_cutoff = 1e-12;
  int reinit_interval = 1;
  int settling_window = 5;
  ReinitEncoding reinit_encoding = ReinitEncoding::Equilibrium;
  AncillaReadout ancilla_readout = AncillaReadout::AtReinit;
  std::uint64_t shots = 0;
  std::uint64_t seed = 1;
  std::string out_dir;  // output root override; may be empty

  // Strict parser: unknown keys are rejected with std::invalid_argument.
  static SimConfig from_json_text(const std::string& text);
  static SimConfig from_json_file(const std::filesystem::path& path);
  std::string to_json_text() const;

  // Deterministic hex digest of the canonical JSON dump; names the run dir.
  std::string config_hash() const;

  HybridConfig hybrid() const;
  void validate() const;
};

// Output root: explicit out_dir, else $QLBM_OUT_ROOT, else ./runs.
std::filesystem::path output_root(const SimConfig& cfg);

// sqrt(mean((a-b)^2)); throws on length mismatch or empty input.
double rms_error(const std::vector<double>& a, const std::vector<double>& b);

// ---------------------------------------------------------------------------
// CSV persistence. All values printed with 17 significant digits so a
// read-back reproduces them bit-exactly.

void write_csv(const std::filesystem::path& path,
               const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};
CsvTable read_csv(const std::filesystem::path& path);

// temps.csv (t, site_0..site_{N-1}) / interface.csv (t, x_I, eta,
// melting_node) for a hybrid run record.
void write_run_csvs(const std::filesystem::path& dir, const std::string& prefix,
                    const std::vector<StepRecord>& steps);
// Same schemas for a classical time series.
void write_classical_csvs(const std::filesystem::path& dir, const std::string& prefix,
                          const std::vector<StepState>& series);

// ---------------------------------------------------------------------------
// Experiments

struct ExperimentSummary {
  std::filesystem::path run_dir;
  double max_rms_T = 0.0;      // quantum vs matched classical, max over time
  double rms_xI = 0.0;         // quantum vs matched classical, RMS over time
  double max_abs_xI_err = 0.0;
  double classical_vs_analytic_max_xI_err = 0.0;  // standard params vs closed form
  double truncation_error = 0.0;
  int reinit_count = 0;
  bool used_mps = false;
  CalibrationReport calibration{};
  std::vector<double> final_T;  // quantum temperature field at run end
};

// Runs the quantum pipeline, the matched classical comparator, the standard
// classical solver, and the analytic solution on identical parameters; emits
// per-method CSVs, errors.csv, and summary.json under the run directory.
ExperimentSummary run_experiment(const SimConfig& cfg);

struct ReinitStudySummary {
  ExperimentSummary interval_1;
  ExperimentSummary interval_12;
  double final_field_rms_diff = 0.0;  // interval-12 vs interval-1 at run end
};

// Side-by-side runs with reinit_interval = 1 and = 12.
ReinitStudySummary compare_reinit_schedules(const SimConfig& cfg);

// Analytic reference for a config: interface trajectory and, when melting is
// active, the lambda solution. Throws std::domain_error for no-melt configs.
struct AnalyticReference {
  LambdaSolution lambda;
  StefanParams stefan;
  std::vector<double> interface_x;  // per step 0..n_steps
};
AnalyticReference analytic_reference(const SimConfig& cfg);

}  // namespace qlbm
