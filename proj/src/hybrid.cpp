#include "qlbm/hybrid.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace qlbm {

namespace {

double clamp01(double v) { return std::min(1.0, std::max(0.0, v)); }

}  // namespace

void HybridConfig::validate() const {
  params.validate();
  if (statevector_cap < 3) throw std::invalid_argument("HybridConfig: statevector cap too small");
  if (chi_max < 1) throw std::invalid_argument("HybridConfig: chi_max must be >= 1");
  if (sv_cutoff < 0.0) throw std::invalid_argument("HybridConfig: negative sv_cutoff");
  if (reinit_interval < 1) throw std::invalid_argument("HybridConfig: reinit_interval must be >= 1");
  if (settling_window < 0) throw std::invalid_argument("HybridConfig: negative settling_window");
}

// ---------------------------------------------------------------------------
// Backend facade

Backend::Backend(int n_qubits, bool use_mps, const HybridConfig& cfg)
    : shots_(cfg.shots), seed_(cfg.seed) {
  if (use_mps) {
    mps_.emplace(n_qubits, cfg.chi_max, cfg.sv_cutoff);
  } else {
    sv_.emplace(n_qubits, cfg.statevector_cap);
  }
}

void Backend::apply(const GateOp& g) {
  if (sv_) sv_->apply(g);
  else mps_->apply(g);
}

double Backend::marginal(int q) {
  if (sv_) {
    if (shots_ > 0) return sv_->sample_shots(q, shots_, seed_ + 0x9e3779b97f4a7c15ull * ++draw_count_);
    return sv_->marginal_prob_one(q);
  }
  return mps_->marginal_prob_one(q);
}

void Backend::apply_program(const std::vector<GateOp>& gates) {
  if (!mps_) {
    for (const GateOp& g : gates) apply(g);
    return;
  }
  std::size_t i = 0;
  while (i < gates.size()) {
    const auto* mc = std::get_if<MultiControlledRyGate>(&gates[i]);
    if (!mc) {
      apply(gates[i++]);
      continue;
    }
    std::vector<MultiControlledRyGate> run{*mc};
    std::size_t j = i + 1;
    for (; j < gates.size(); ++j) {
      const auto* next = std::get_if<MultiControlledRyGate>(&gates[j]);
      if (!next || next->target != mc->target ||
          next->controls.size() != mc->controls.size()) {
        break;
      }
      bool same = true;
      for (std::size_t k = 0; k < mc->controls.size(); ++k) {
        if (next->controls[k].qubit != mc->controls[k].qubit) same = false;
      }
      if (!same) break;
      run.push_back(*next);
    }
    mps_->apply_mcry_run(run);
    i = j;
  }
}

std::vector<double> Backend::all_marginals() {
  if (sv_ && shots_ == 0) return sv_->all_marginals();
  if (mps_) return mps_->all_marginals();
  std::vector<double> p(n_qubits());
  for (int q = 0; q < n_qubits(); ++q) p[q] = marginal(q);
  return p;
}

int Backend::n_qubits() const { return sv_ ? sv_->n_qubits() : mps_->n_qubits(); }

double Backend::truncation_error() const {
  return mps_ ? mps_->truncation_error_report() : 0.0;
}

// ---------------------------------------------------------------------------
// Calibration

CalibrationReport calibrate_collision(double theta_mix, ReinitEncoding encoding) {
  const UnitaryMatrix uc = build_collision_operator(theta_mix);

  auto post_marginals = [&uc](const std::array<double, 3>& f) {
    StateVector sv(3);
    for (int i = 0; i < 3; ++i) sv.apply(RyGate{i, encoding_angle(f[i])});
    sv.apply(ThreeQubitGate{uc, {0, 1, 2}});
    return std::array<double, 3>{sv.marginal_prob_one(0), sv.marginal_prob_one(1),
                                 sv.marginal_prob_one(2)};
  };

  // Equilibrium weights from first principles: iterate the collision
  // marginal map to its fixed point at each probe temperature (the map is a
  // contraction around equilibrium) and read off w_i = f_i / T.
  const double temps[] = {0.15, 0.3, 0.45, 0.6, 0.75, 0.9};
  std::array<double, 3> w_eq = {1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0};
  {
    std::array<double, 3> acc = {0.0, 0.0, 0.0};
    for (double T : temps) {
      std::array<double, 3> f = {T / 3, T / 3, T / 3};
      for (int it = 0; it < 200; ++it) {
        const auto m = post_marginals(f);
        double delta = 0.0;
        for (int i = 0; i < 3; ++i) delta = std::max(delta, std::abs(m[i] - f[i]));
        f = m;
        if (delta < 1e-15) break;
      }
      for (int i = 0; i < 3; ++i) acc[i] += f[i] / T;
    }
    const double total = acc[0] + acc[1] + acc[2];
    for (int i = 0; i < 3; ++i) w_eq[i] = acc[i] / total;
  }

  // Linear-response fit around equilibrium for the bare relaxation rate.
  const std::array<double, 3> dirs[] = {
      {0.0, 0.0, 0.0}, {1.0, -1.0, 0.0}, {0.0, 1.0, -1.0},
      {1.0, 0.0, -1.0}, {2.0, -1.0, -1.0}};
  const double amp = 0.005;

  std::vector<std::array<double, 3>> samples, responses;
  for (double T : temps) {
    for (const auto& d : dirs) {
      std::array<double, 3> f;
      for (int i = 0; i < 3; ++i) f[i] = clamp01(w_eq[i] * T + amp * d[i]);
      samples.push_back(f);
      responses.push_back(post_marginals(f));
    }
  }

  // Fit f'_i - f_i = p_i T - q f_i with unknowns (p0, p1, p2, q); then
  // omega = q, w_i = p_i / q.
  const int rows = static_cast<int>(samples.size()) * 3;
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(rows, 4);
  Eigen::VectorXd b(rows);
  for (std::size_t s = 0; s < samples.size(); ++s) {
    const auto& f = samples[s];
    const double T = f[0] + f[1] + f[2];
    for (int i = 0; i < 3; ++i) {
      const int r = static_cast<int>(s) * 3 + i;
      a(r, i) = T;
      a(r, 3) = -f[i];
      b(r) = responses[s][i] - f[i];
    }
  }
  const Eigen::VectorXd x = a.bdcSvd(Eigen::ComputeThinU | Eigen::ComputeThinV).solve(b);

  CalibrationReport rep{};
  rep.bare_omega = x(3);
  double wsum = 0.0;
  for (int i = 0; i < 3; ++i) wsum += x(i);
  for (int i = 0; i < 3; ++i) rep.bare_weights[i] = x(i) / wsum;
  rep.fit_rms = std::sqrt((a * x - b).squaredNorm() / rows);

  rep.equilibrium_fixed_point_error = 0.0;
  for (double T : temps) {
    std::array<double, 3> f;
    for (int i = 0; i < 3; ++i) f[i] = w_eq[i] * T;
    const auto m = post_marginals(f);
    for (int i = 0; i < 3; ++i) {
      rep.equilibrium_fixed_point_error =
          std::max(rep.equilibrium_fixed_point_error, std::abs(m[i] - f[i]));
    }
  }

  // A re-encoded (equilibrium-projected) step relaxes completely when
  // equilibrium states are fixed points, i.e. the comparator has omega = 1.
  rep.matched_weights = w_eq;
  if (encoding == ReinitEncoding::Equilibrium &&
      rep.equilibrium_fixed_point_error < 1e-8) {
    rep.matched_omega = 1.0;
  } else {
    rep.matched_omega = rep.bare_omega;
  }
  return rep;
}

Params matched_comparator_params(const Params& base, const CalibrationReport& cal) {
  Params p = base;
  p.weights = cal.matched_weights;
  p.omega_override = cal.matched_omega;
  return p;
}

// ---------------------------------------------------------------------------
// Scheduling helpers

std::vector<bool> reinit_schedule(int n_steps, int reinit_interval,
                                  int settling_window,
                                  const std::vector<int>& node_change_steps) {
  if (reinit_interval < 1) throw std::invalid_argument("reinit_schedule: interval must be >= 1");
  std::vector<bool> kinds(n_steps, false);
  int last_reinit = 0;
  for (int t = 0; t < n_steps; ++t) {
    bool settling = false;
    for (int c : node_change_steps) {
      if (c <= t && t < c + settling_window) settling = true;
    }
    if (t == 0 || settling || t - last_reinit >= reinit_interval) {
      kinds[t] = true;
      last_reinit = t;
    }
  }
  return kinds;
}

std::optional<int> predict_full_melt(
    const std::vector<std::pair<int, double>>& history) {
  if (history.size() < 2) {
    throw std::invalid_argument("predict_full_melt: need at least two points");
  }
  double st = 0, se = 0, stt = 0, ste = 0;
  const double n = static_cast<double>(history.size());
  for (const auto& [t, e] : history) {
    st += t;
    se += e;
    stt += static_cast<double>(t) * t;
    ste += t * e;
  }
  const double denom = n * stt - st * st;
  if (denom == 0.0) return std::nullopt;
  const double slope = (n * ste - st * se) / denom;
  if (slope <= 0.0) return std::nullopt;
  const double intercept = (se - slope * st) / n;
  // Guard the ceiling against rounding dust when the crossing lands on an
  // integer step.
  return static_cast<int>(std::ceil((1.0 - intercept) / slope - 1e-9));
}

void BoundaryTracker::push(const std::array<double, 3>& triple) {
  if (!history.empty()) {
    const auto& prev = history.back();
    steady = std::abs(prev[0] - triple[0]) < 1e-4 &&
             std::abs(prev[1] - triple[1]) < 1e-4 &&
             std::abs(prev[2] - triple[2]) < 1e-4;
  }
  history.push_back(triple);
  while (static_cast<int>(history.size()) > capacity) history.pop_front();
}

// ---------------------------------------------------------------------------
// Solver

HybridSolver::HybridSolver(const HybridConfig& cfg) : cfg_(cfg), n_(cfg.params.n_sites) {
  cfg_.validate();
  cal_ = calibrate_collision(2.0 * M_PI / 3.0, cfg_.reinit_encoding);
  const auto& wq = cal_.matched_weights;

  record_.f.assign(n_, {0.0, 0.0, 0.0});
  for (int k = 0; k < n_; ++k) {
    const double T = (k == 0) ? cfg_.params.T_bound : cfg_.params.T_solid;
    for (int i = 0; i < 3; ++i) record_.f[k][i] = wq[i] * T;
  }
  ledger_.eta.assign(n_, 0.0);

  left_f2_inj_ = clamp01(cfg_.params.T_bound - record_.f[0][0] - record_.f[1][1]);
  right_f1_inj_ =
      clamp01(cfg_.params.T_solid - record_.f[n_ - 1][0] - record_.f[n_ - 2][2]);
  left_tracker_.push(record_.f[0]);
  right_tracker_.push(record_.f[n_ - 1]);
  left_tracker_.capacity = right_tracker_.capacity = 5;
}

Backend HybridSolver::make_backend(int n_sites) const {
  bool use_mps;
  switch (cfg_.backend) {
    case BackendKind::Statevector: use_mps = false; break;
    case BackendKind::Mps: use_mps = true; break;
    default: {
      // Allow room for the fresh qubits accrued between re-encodes: two
      // boundary injections per step, plus one interface ancilla on melting
      // runs.
      const int per_step = 2 + (cfg_.params.melting_enabled() ? 1 : 0);
      const int worst = 3 * n_sites + per_step * cfg_.reinit_interval;
      use_mps = worst > cfg_.statevector_cap;
    }
  }
  return Backend(3 * n_sites, use_mps, cfg_);
}

void HybridSolver::rebuild_registers() {
  if (liquid_) truncation_total_ += liquid_->state.truncation_error();
  if (solid_) truncation_total_ += solid_->state.truncation_error();
  liquid_.reset();
  solid_.reset();

  auto encode_range = [this](int lo, int hi) {
    Register reg{lo, hi, make_backend(hi - lo + 1), {}};
    std::vector<std::array<double, 3>> field;
    for (int k = lo; k <= hi; ++k) {
      std::array<double, 3> f = record_.f[k];
      for (double& v : f) v = clamp01(v);
      field.push_back(f);
    }
    for (const GateOp& g : build_encoding(field)) reg.state.apply(g);
    return reg;
  };

  if (ledger_.melting_node) {
    const int mn = *ledger_.melting_node;
    liquid_.emplace(encode_range(0, mn));
    solid_.emplace(encode_range(mn, n_ - 1));
  } else {
    liquid_.emplace(encode_range(0, n_ - 1));
  }
  ++reinit_count_;
  pending_rebuild_ = false;
}

void HybridSolver::step_register(Register& reg, bool is_liquid, bool is_single) {
  StepContext ctx;
  ctx.layout = LatticeLayout{reg.site_hi - reg.site_lo + 1};
  ctx.base_qubits = reg.state.n_qubits();
  if (is_liquid) {
    ctx.left_f2_injection = left_f2_inj_;
    ctx.right_f1_injection = is_single ? right_f1_inj_ : iface_f1_inj_;
    if (!is_single && ledger_.melting_node) {
      ctx.interface_site = *ledger_.melting_node - reg.site_lo;
    }
  } else {
    ctx.left_f2_injection = iface_f2_inj_;
    ctx.right_f1_injection = right_f1_inj_;
  }
  const StepProgram prog = build_step(ctx);
  reg.state.apply_program(prog.gates);
  if (prog.interface_ancilla) {
    reg.ancillas.push_back(*prog.interface_ancilla);
    const double T_iface = 3.0 * reg.state.marginal(*prog.interface_ancilla);
    readings_.push_back(T_iface);
    last_T_interface_ = T_iface;
  }
}

void HybridSolver::execute_step() {
  const bool single = !solid_.has_value();
  step_register(*liquid_, true, single);
  if (solid_) step_register(*solid_, false, false);
}

std::array<double, 3> HybridSolver::read_site(Register& reg, int global_site) {
  const int local = global_site - reg.site_lo;
  return {reg.state.marginal(3 * local), reg.state.marginal(3 * local + 1),
          reg.state.marginal(3 * local + 2)};
}

std::array<double, 3> HybridSolver::register_site_marginals(bool liquid, int global_site) {
  Register& reg = liquid ? *liquid_ : *solid_;
  return read_site(reg, global_site);
}

void HybridSolver::readout(int t) {
  const Params& p = cfg_.params;
  const auto& wq = cal_.matched_weights;

  // 1. Measure every site; the melting node is read from both registers and
  //    combined (fresh components win over the stale injected ones).
  LatticeField meas;
  meas.f.assign(n_, {0.0, 0.0, 0.0});
  auto site_from = [](const std::vector<double>& all, int local) {
    return std::array<double, 3>{all[3 * local], all[3 * local + 1],
                                 all[3 * local + 2]};
  };
  const std::vector<double> liq_all = liquid_->state.all_marginals();
  if (solid_) {
    const std::vector<double> sol_all = solid_->state.all_marginals();
    const int mn = *ledger_.melting_node;
    for (int k = 0; k < mn; ++k) meas.f[k] = site_from(liq_all, k);
    for (int k = mn + 1; k < n_; ++k) meas.f[k] = site_from(sol_all, k - mn);
    const auto liq = site_from(liq_all, mn);
    const auto sol = site_from(sol_all, 0);
    meas.f[mn] = {0.5 * (liq[0] + sol[0]), sol[1], liq[2]};
  } else {
    for (int k = 0; k < n_; ++k) meas.f[k] = site_from(liq_all, k);
  }
  record_ = meas;

  // 2. Ledger update at the melting node via the piecewise enthalpy map on
  //    H = T + L*eta: below T_melt the node is plain solid (no latent
  //    exchange), inside the mushy window the temperature pins to T_melt,
  //    above it the surplus returns as sensible heat and the front advances.
  if (ledger_.melting_node) {
    const int mn = *ledger_.melting_node;
    const double T_fresh =
        record_.f[mn][0] + record_.f[mn][1] + record_.f[mn][2];
    const double h = T_fresh + p.L_over_cp * ledger_.eta[mn];
    double T_new, eta_new;
    if (h < p.T_melt) {
      T_new = h;
      eta_new = 0.0;
    } else if (h < p.T_melt + p.L_over_cp) {
      T_new = p.T_melt;
      eta_new = (h - p.T_melt) / p.L_over_cp;
    } else {
      T_new = h - p.L_over_cp;
      eta_new = 1.0;
    }
    const double phi = T_fresh - T_new;
    for (int i = 0; i < 3; ++i) record_.f[mn][i] -= wq[i] * phi;
    ledger_.eta[mn] = eta_new;

    if (eta_new >= 1.0) {
      eta_history_.clear();
      predicted_melt_step_.reset();
      last_change_step_ = t;
      if (mn + 1 <= n_ - 1) {
        ledger_.melting_node = mn + 1;
        ledger_.eta[mn + 1] = 0.0;
      }
      // The far boundary node is pinned at T_solid and cannot melt; stop
      // cleanly when the front reaches it.
      if (*ledger_.melting_node == n_ - 1) done_ = true;
    }
  } else if (p.melting_enabled()) {
    // Activation: the first node right of the hot boundary starts melting
    // when its measured temperature crosses T_melt.
    const int candidate = 1;
    const double T1 = record_.f[candidate][0] + record_.f[candidate][1] +
                      record_.f[candidate][2];
    if (T1 > p.T_melt) {
      ledger_.melting_node = candidate;
      const double phi = T1 - p.T_melt;
      ledger_.eta[candidate] += phi / p.L_over_cp;
      for (int i = 0; i < 3; ++i) record_.f[candidate][i] -= wq[i] * phi;
      eta_history_.clear();
      last_change_step_ = t;
    }
  }

  // 3. Boundary conditions are enforced at re-encoding: the measured
  //    boundary triples are replaced by closure-consistent ones so the
  //    Dirichlet temperatures hold exactly (the raw closure value can be
  //    negative and hence unencodable; the record keeps the exact value and
  //    the encoder clamps).
  record_.f[0][2] = p.T_bound - record_.f[0][0] - record_.f[0][1];
  record_.f[n_ - 1][1] = p.T_solid - record_.f[n_ - 1][0] - record_.f[n_ - 1][2];
  if (cfg_.reinit_encoding == ReinitEncoding::Equilibrium) {
    for (int k = 0; k < n_; ++k) {
      const double T = record_.f[k][0] + record_.f[k][1] + record_.f[k][2];
      for (int i = 0; i < 3; ++i) record_.f[k][i] = wq[i] * T;
    }
  }

  // 4. Quasi-static injection values for the steps until the next readout.
  left_f2_inj_ = clamp01(p.T_bound - record_.f[0][0] - record_.f[1][1]);
  right_f1_inj_ = clamp01(p.T_solid - record_.f[n_ - 1][0] - record_.f[n_ - 2][2]);
  if (ledger_.melting_node) {
    const int mn = *ledger_.melting_node;
    if (mn + 1 <= n_ - 1) iface_f1_inj_ = clamp01(record_.f[mn + 1][1]);
    if (mn - 1 >= 0) iface_f2_inj_ = clamp01(record_.f[mn - 1][2]);
  }
  left_tracker_.push(record_.f[0]);
  right_tracker_.push(record_.f[n_ - 1]);

  // 5. Melt-completion extrapolation.
  if (ledger_.melting_node) {
    eta_history_.emplace_back(t, ledger_.eta[*ledger_.melting_node]);
    if (eta_history_.size() >= 2) {
      predicted_melt_step_ = predict_full_melt(eta_history_);
    } else {
      predicted_melt_step_.reset();
    }
  }

  readings_.clear();
  last_readout_step_ = t;
  pending_rebuild_ = true;
}

double HybridSolver::live_eta_at_melting_node() const {
  if (!ledger_.melting_node) return 0.0;
  const int mn = *ledger_.melting_node;
  if (readings_.empty()) return ledger_.eta[mn];
  return ledger_.eta[mn] +
         std::max(0.0, (readings_.back() - cfg_.params.T_melt) / cfg_.params.L_over_cp);
}

double HybridSolver::total_enthalpy() const {
  double h = 0.0;
  for (int k = 0; k < n_; ++k) {
    h += record_.f[k][0] + record_.f[k][1] + record_.f[k][2];
    h += cfg_.params.L_over_cp * ledger_.eta[k];
  }
  return h;
}

void HybridSolver::write_record_row(int t, bool reinit_flag) {
  StepRecord row;
  row.t = t;
  row.T = record_.temperatures();
  row.eta = ledger_.eta;
  row.melting_node = ledger_.melting_node ? *ledger_.melting_node : -1;
  row.interface_x = ledger_.interface_x();
  row.T_interface = readings_.empty() ? last_T_interface_ : readings_.back();
  if (cfg_.ancilla_readout == AncillaReadout::EveryStep && ledger_.melting_node &&
      !readings_.empty()) {
    const int mn = *ledger_.melting_node;
    row.eta[mn] = live_eta_at_melting_node();
    row.interface_x = mn + (row.eta[mn] - 0.5);
  }
  double trunc = truncation_total_;
  if (liquid_) trunc += liquid_->state.truncation_error();
  if (solid_) trunc += solid_->state.truncation_error();
  row.truncation_error = trunc;
  row.reinit = reinit_flag;
  records_.push_back(std::move(row));
}

HybridResult HybridSolver::run(int n_steps) {
  if (n_steps < 0) throw std::invalid_argument("HybridSolver::run: negative step count");
  records_.clear();
  write_record_row(0, false);

  for (int t = 1; t <= n_steps; ++t) {
    if (done_) {
      StepRecord row = records_.back();
      row.t = t;
      row.reinit = false;
      records_.push_back(std::move(row));
      continue;
    }
    bool reinit_flag = false;
    if (pending_rebuild_) {
      rebuild_registers();
      reinit_flag = true;
    }
    execute_step();

    const int next_t = t + 1;
    const bool settling = next_t - last_change_step_ <= cfg_.settling_window;
    const bool interval_due = t - last_readout_step_ >= cfg_.reinit_interval;
    const bool predicted = predicted_melt_step_ && t >= *predicted_melt_step_;
    if (t == n_steps || settling || interval_due || predicted) {
      readout(t);
    }
    write_record_row(t, reinit_flag);
  }

  HybridResult res;
  res.steps = records_;
  res.calibration = cal_;
  res.reinit_count = reinit_count_;
  res.used_mps = liquid_ && liquid_->state.is_mps();
  res.terminated_early = done_;
  return res;
}

HybridResult run_hybrid(const HybridConfig& cfg, int n_steps) {
  HybridSolver solver(cfg);
  return solver.run(n_steps);
}

}  // namespace qlbm
