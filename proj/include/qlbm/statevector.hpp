#pragma once
// Dense pure-state simulator. Qubit 0 is the least-significant bit of the
// basis index. PrepareFresh grows the register by one qubit (the new qubit
// becomes the most-significant bit).

#include <cstdint>
#include <vector>

#include "qlbm/numerics.hpp"

namespace qlbm {

class StateVector {
 public:
  explicit StateVector(int n_qubits, int qubit_cap = 26);

  int n_qubits() const { return n_; }
  int qubit_cap() const { return cap_; }
  const std::vector<Complex>& amplitudes() const { return amp_; }

  void apply(const GateOp& gate);

  // P(qubit reads 1).
  double marginal_prob_one(int qubit) const;

  // All qubit marginals in one pass over the amplitudes.
  std::vector<double> all_marginals() const;

  // Binomial estimate of marginal_prob_one with a deterministic seed.
  double sample_shots(int qubit, std::uint64_t shots, std::uint64_t seed) const;

  double norm() const;

 private:
  void apply_ry(const RyGate& g);
  void apply_swap(const SwapGate& g);
  void apply_three(const ThreeQubitGate& g);
  void apply_mcry(const MultiControlledRyGate& g);
  void apply_fresh(const PrepareFreshGate& g);
  void check_index(int qubit) const;

  int n_;
  int cap_;
  std::vector<Complex> amp_;
};

}  // namespace qlbm
