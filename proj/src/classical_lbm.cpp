#include "qlbm/classical_lbm.hpp"

namespace qlbm {

void collide(LatticeField& field, const Params& p) {
  const double om = p.omega();
  for (auto& fk : field.f) {
    const double T = fk[0] + fk[1] + fk[2];
    for (int i = 0; i < 3; ++i) fk[i] = (1.0 - om) * fk[i] + om * p.weights[i] * T;
  }
}

void stream_and_bound(LatticeField& field, const Params& p) {
  const int n = field.n_sites();
  if (n < 2) throw std::invalid_argument("stream_and_bound: need at least two sites");
  for (int k = 0; k + 1 < n; ++k) field.f[k][1] = field.f[k + 1][1];
  for (int k = n - 1; k >= 1; --k) field.f[k][2] = field.f[k - 1][2];
  field.f[0][2] = p.T_bound - field.f[0][0] - field.f[0][1];
  field.f[n - 1][1] = p.T_solid - field.f[n - 1][0] - field.f[n - 1][2];
}

void phase_change_update(LatticeField& field, PhaseLedger& ledger, const Params& p) {
  if (!ledger.melting_node) {
    throw std::invalid_argument("phase_change_update: no melting node set");
  }
  const int mn = *ledger.melting_node;
  auto& fm = field.f[mn];
  // Piecewise enthalpy map on the node enthalpy H = T + L*eta: below the
  // melt point the node is plain solid (no latent exchange), inside the
  // mushy window the temperature pins to T_melt, above it the node is fully
  // liquid and the surplus returns as sensible heat. Each branch conserves
  // H exactly; the mushy branch reduces to eta += (T - T_melt)/L.
  const double T_now = fm[0] + fm[1] + fm[2];
  const double h = T_now + p.L_over_cp * ledger.eta[mn];
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
  const double phi = T_now - T_new;
  for (int i = 0; i < 3; ++i) fm[i] -= p.weights[i] * phi;
  ledger.eta[mn] = eta_new;

  if (eta_new >= 1.0 && mn + 1 < field.n_sites()) {
    ledger.melting_node = mn + 1;
    ledger.eta[mn + 1] = 0.0;
  }
}

std::vector<StepState> run(const Params& p, int n_steps) {
  p.validate();
  if (n_steps < 0) throw std::invalid_argument("run: negative step count");

  StepState s;
  s.field.f.assign(p.n_sites, {0.0, 0.0, 0.0});
  for (int k = 0; k < p.n_sites; ++k) {
    const double T = (k == 0) ? p.T_bound : p.T_solid;
    for (int i = 0; i < 3; ++i) s.field.f[k][i] = p.weights[i] * T;
  }
  s.ledger.eta.assign(p.n_sites, 0.0);

  std::vector<StepState> series;
  series.reserve(n_steps + 1);
  series.push_back(s);

  for (int t = 0; t < n_steps; ++t) {
    collide(s.field, p);
    stream_and_bound(s.field, p);
    if (p.melting_enabled()) {
      if (!s.ledger.melting_node) {
        // A node starts melting when it first exceeds T_melt; the front is
        // contiguous, so the candidate is the first node right of the hot
        // boundary.
        const int candidate = 1;
        if (s.field.temperature(candidate) > p.T_melt) {
          s.ledger.melting_node = candidate;
        }
      }
      if (s.ledger.melting_node) phase_change_update(s.field, s.ledger, p);
    }
    series.push_back(s);
  }
  return series;
}

}  // namespace qlbm
