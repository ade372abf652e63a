#pragma once
// Classical D1Q3 enthalpy-method lattice Boltzmann solver for 1D heat
// conduction with a melting front; the ground-truth comparator for the
// quantum pipeline.

#include <array>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <vector>

namespace qlbm {

struct Params {
  double alpha = 1.0 / 6.0;  // lattice diffusivity
  double T_bound = 1.0;
  double T_solid = 0.0;
  double T_melt = 0.4;
  double L_over_cp = 10.0;  // latent heat over specific heat
  int n_sites = 17;
  // dt = dx = 1 throughout.
  //
  // The rest channel (direction 0) carries weight 2/3 and the two moving
  // channels 1/6 each; any other assignment gives the moving channels a net
  // drift and breaks pure diffusion (sum_i w_i e_i must vanish).
  std::array<double, 3> weights = {2.0 / 3.0, 1.0 / 6.0, 1.0 / 6.0};
  // When set, overrides the diffusivity-derived relaxation rate; used for
  // calibrated comparator runs.
  std::optional<double> omega_override;

  double omega() const {
    return omega_override ? *omega_override : 2.0 / (6.0 * alpha + 1.0);
  }
  bool melting_enabled() const { return T_melt < T_bound; }

  void validate() const {
    if (!(alpha > 0.0)) throw std::invalid_argument("Params: alpha must be positive");
    if (n_sites < 2) throw std::invalid_argument("Params: need at least two sites");
    const double om = omega();
    if (!(om > 0.0 && om < 2.0)) throw std::invalid_argument("Params: omega outside (0,2)");
    double wsum = weights[0] + weights[1] + weights[2];
    if (std::abs(wsum - 1.0) > 1e-12) throw std::invalid_argument("Params: weights must sum to 1");
    if (melting_enabled() && !(T_solid < T_melt)) {
      throw std::invalid_argument("Params: need T_solid < T_melt < T_bound for melting runs");
    }
    if (!(L_over_cp > 0.0)) throw std::invalid_argument("Params: L_over_cp must be positive");
  }
};

struct LatticeField {
  std::vector<std::array<double, 3>> f;

  double temperature(int k) const { return f[k][0] + f[k][1] + f[k][2]; }
  int n_sites() const { return static_cast<int>(f.size()); }
  std::vector<double> temperatures() const {
    std::vector<double> t(f.size());
    for (std::size_t k = 0; k < f.size(); ++k) t[k] = f[k][0] + f[k][1] + f[k][2];
    return t;
  }
};

struct PhaseLedger {
  std::vector<double> eta;  // liquid fraction per node
  std::optional<int> melting_node;

  // Sub-grid interface position; 0 before a melting node exists.
  double interface_x() const {
    if (!melting_node) return 0.0;
    return *melting_node + (eta[*melting_node] - 0.5);
  }
};

// f' = (1 - omega) f + omega w T; node temperature conserved exactly.
void collide(LatticeField& field, const Params& p);

// f1 shifts left, f2 shifts right, f0 fixed; the unknown incoming values at
// the two ends are closed so the boundary temperatures hold exactly.
void stream_and_bound(LatticeField& field, const Params& p);

// Latent-heat exchange at the melting node, expressed as a piecewise map on
// the node enthalpy H = T + L*eta: below T_melt the node stays solid, in the
// mushy window [T_melt, T_melt + L) the temperature pins to T_melt and the
// excess converts to liquid fraction, and at or above T_melt + L the surplus
// returns as sensible heat and the node advances. Enthalpy is conserved on
// every branch. Throws when no melting node is set.
void phase_change_update(LatticeField& field, PhaseLedger& ledger, const Params& p);

struct StepState {
  LatticeField field;
  PhaseLedger ledger;
};

// Initial condition T(0) = T_bound, T(k>=1) = T_solid, f = w T, eta = 0;
// per step: collide -> stream_and_bound -> phase_change_update (once a node
// has crossed T_melt). Returns n_steps+1 states, index = time.
std::vector<StepState> run(const Params& p, int n_steps);

}  // namespace qlbm
