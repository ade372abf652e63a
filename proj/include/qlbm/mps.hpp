#pragma once
// Matrix-product-state simulator over a 1D qubit chain with SVD truncation.
// Mirrors the statevector interface; non-adjacent multi-qubit gates are
// routed by adjacent-swap chains.

#include <Eigen/Dense>
#include <vector>

#include "qlbm/numerics.hpp"

namespace qlbm {

class MpsState {
 public:
  explicit MpsState(int n_qubits, int chi_max = 64, double sv_cutoff = 1e-12);

  int n_qubits() const { return static_cast<int>(sites_.size()); }
  int chi_max() const { return chi_max_; }
  double sv_cutoff() const { return sv_cutoff_; }

  void apply(const GateOp& gate);

  // Applies a run of multi-controlled rotations that all act on the same
  // control qubits and target. The rotations address disjoint control
  // patterns, so their product is applied with a single routing pass
  // instead of one per gate.
  void apply_mcry_run(const std::vector<MultiControlledRyGate>& gates);

  // P(qubit reads 1), clamped into [0,1] from within +-1e-9.
  double marginal_prob_one(int qubit);

  // All qubit marginals via one left-to-right center sweep.
  std::vector<double> all_marginals();

  // Cumulative discarded squared singular-value weight.
  double truncation_error_report() const { return discarded_; }

  double norm();
  std::vector<int> bond_dims() const;

  // Max deviation from the isometry conditions left and right of the
  // orthogonality center (diagnostic for tests).
  double canonical_form_defect() const;

 private:
  // Per-site tensor: one chiL x chiR matrix per physical value.
  struct Site {
    Eigen::MatrixXcd m[2];
  };

  void check_index(int qubit) const;
  void move_center(int k);
  void left_orthogonalize(int k);   // absorbs the remainder into k+1
  void right_orthogonalize(int k);  // absorbs the remainder into k-1
  void apply_single(int qubit, const Eigen::Matrix2cd& u);
  void apply_adjacent_swap(int k);  // swaps qubits k and k+1, exact
  // Dense unitary on the contiguous block [base, base+m); center ends at
  // base+m-1. Local basis bit j corresponds to chain position base+j.
  void apply_contiguous(int base, int m, const Eigen::MatrixXcd& u);
  // General entry point: routes qubits adjacent, applies, routes back.
  // `qubits[j]` carries local bit j of `u`.
  void apply_dense(const std::vector<int>& qubits, const Eigen::MatrixXcd& u);

  std::vector<Site> sites_;
  int center_ = 0;
  int chi_max_;
  double sv_cutoff_;
  double discarded_ = 0.0;
};

}  // namespace qlbm
