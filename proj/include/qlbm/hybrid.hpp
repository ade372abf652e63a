#pragma once
// Hybrid quantum-classical time loop: two-register domain split around the
// melting node, reinitialization scheduling, ancilla bookkeeping,
// liquid-fraction ledger updates from interface-ancilla readouts,
// quasi-static boundary tracking, and melt-completion extrapolation.

#include <cstdint>
#include <deque>
#include <optional>
#include <string>
#include <vector>

#include "qlbm/circuit.hpp"
#include "qlbm/classical_lbm.hpp"
#include "qlbm/mps.hpp"
#include "qlbm/statevector.hpp"

namespace qlbm {

enum class BackendKind { Auto, Statevector, Mps };
enum class ReinitEncoding { Equilibrium, Marginal };
enum class AncillaReadout { AtReinit, EveryStep };

struct HybridConfig {
  Params params;
  BackendKind backend = BackendKind::Auto;
  int statevector_cap = 26;
  int chi_max = 64;
  double sv_cutoff = 1e-12;
  int reinit_interval = 1;
  int settling_window = 5;
  ReinitEncoding reinit_encoding = ReinitEncoding::Equilibrium;
  AncillaReadout ancilla_readout = AncillaReadout::AtReinit;
  std::uint64_t shots = 0;  // 0 = exact expectation readout
  std::uint64_t seed = 1;

  void validate() const;
};

// Uniform facade over the two simulators.
class Backend {
 public:
  Backend(int n_qubits, bool use_mps, const HybridConfig& cfg);
  void apply(const GateOp& g);
  // Applies a gate sequence; on the MPS backend, consecutive
  // multi-controlled rotations over one qubit set are fused into a single
  // dense application to avoid repeated swap routing.
  void apply_program(const std::vector<GateOp>& gates);
  double marginal(int q);
  std::vector<double> all_marginals();
  int n_qubits() const;
  double truncation_error() const;
  bool is_mps() const { return mps_.has_value(); }

 private:
  std::optional<StateVector> sv_;
  std::optional<MpsState> mps_;
  std::uint64_t shots_ = 0;
  std::uint64_t seed_ = 0;
  std::uint64_t draw_count_ = 0;
};

// Collision-operator calibration: probes post-collision marginals of the
// three-qubit collision unitary on product states and fits the classical
// relaxation model f' = (1-omega) f + omega w T.
struct CalibrationReport {
  double bare_omega;                   // fit on raw post-collision marginals
  std::array<double, 3> bare_weights;
  double fit_rms;                      // residual of the linear fit
  // Max deviation of equilibrium product states (f = w T) from being fixed
  // points of the collision marginal map; ~0 means a re-encoded step relaxes
  // completely, i.e. the matched comparator has omega = 1.
  double equilibrium_fixed_point_error;
  double matched_omega;
  std::array<double, 3> matched_weights;
};

CalibrationReport calibrate_collision(double theta_mix, ReinitEncoding encoding);

// Classical comparator with collision parameters matched to the quantum
// pipeline per the calibration report.
Params matched_comparator_params(const Params& base, const CalibrationReport& cal);

// Pure schedule: step kinds for steps 1..n_steps (true = re-encode at step
// start). Reinit every `reinit_interval` steps, plus per-step reinits for
// `settling_window` steps from each melting-node change.
std::vector<bool> reinit_schedule(int n_steps, int reinit_interval,
                                  int settling_window,
                                  const std::vector<int>& node_change_steps);

// Least-squares linear extrapolation of the liquid-fraction history; returns
// the first step where the fit reaches 1, or nullopt for nonincreasing
// history. Points are (step, eta).
std::optional<int> predict_full_melt(const std::vector<std::pair<int, double>>& history);

struct BoundaryTracker {
  std::deque<std::array<double, 3>> history;  // last K triples
  bool steady = false;
  int capacity = 5;

  void push(const std::array<double, 3>& triple);
};

struct StepRecord {
  int t = 0;
  std::vector<double> T;
  std::vector<double> eta;
  int melting_node = -1;
  double interface_x = 0.0;
  double T_interface = 0.0;  // latest interface-ancilla reading (0 if none)
  double truncation_error = 0.0;
  bool reinit = false;  // step began with a fresh re-encode
};

struct HybridResult {
  std::vector<StepRecord> steps;  // n_steps + 1 rows, row 0 = initial state
  CalibrationReport calibration;
  int reinit_count = 0;
  bool used_mps = false;
  bool terminated_early = false;  // melting front reached the domain end
};

class HybridSolver {
 public:
  explicit HybridSolver(const HybridConfig& cfg);

  // Full loop; returns n_steps+1 records.
  HybridResult run(int n_steps);

  // Exposed for tests -------------------------------------------------------
  // Fresh product-state registers from the classical record (the melting
  // node constrained to sum T_melt beforehand by readout).
  void rebuild_registers();
  // One circuit step on the current registers (no re-encode).
  void execute_step();
  // Measure all marginals, update ledger/trackers/record, discard ancillas.
  void readout(int t);

  const LatticeField& record() const { return record_; }
  const CalibrationReport& calibration() const { return cal_; }
  const PhaseLedger& ledger() const { return ledger_; }
  std::optional<int> melting_node() const { return ledger_.melting_node; }
  int reinit_count() const { return reinit_count_; }
  const std::vector<double>& ancilla_readings() const { return readings_; }
  // Marginals of one register's copy of a global site (for overlap checks).
  std::array<double, 3> register_site_marginals(bool liquid, int global_site);
  bool has_split() const { return solid_.has_value(); }
  double total_enthalpy() const;

 private:
  struct Register {
    int site_lo, site_hi;  // inclusive global range
    Backend state;
    std::vector<int> ancillas;
  };

  Backend make_backend(int n_sites) const;
  void step_register(Register& reg, bool is_liquid, bool is_single);
  std::array<double, 3> read_site(Register& reg, int global_site);
  void write_record_row(int t, bool reinit_flag);
  double live_eta_at_melting_node() const;

  HybridConfig cfg_;
  CalibrationReport cal_{};
  int n_;
  LatticeField record_;  // authoritative classical marginal record
  PhaseLedger ledger_;
  std::optional<Register> liquid_;  // doubles as the single register pre-split
  std::optional<Register> solid_;
  // Quasi-static injection values, refreshed at readouts.
  double left_f2_inj_ = 0.0;
  double right_f1_inj_ = 0.0;
  double iface_f1_inj_ = 0.0;
  double iface_f2_inj_ = 0.0;
  BoundaryTracker left_tracker_, right_tracker_;
  std::vector<double> readings_;  // interface-ancilla temperatures, in order
  double last_T_interface_ = 0.0;
  std::vector<std::pair<int, double>> eta_history_;
  std::optional<int> predicted_melt_step_;
  int last_change_step_ = 0;
  int last_readout_step_ = 0;
  int reinit_count_ = 0;
  bool pending_rebuild_ = true;
  bool done_ = false;
  double truncation_total_ = 0.0;
  std::vector<StepRecord> records_;
};

HybridResult run_hybrid(const HybridConfig& cfg, int n_steps);

}  // namespace qlbm
