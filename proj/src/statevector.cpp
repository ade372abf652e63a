#include "qlbm/statevector.hpp"

#include <bit>
#include <cmath>
#include <random>
#include <stdexcept>

namespace qlbm {

StateVector::StateVector(int n_qubits, int qubit_cap)
    : n_(n_qubits), cap_(qubit_cap) {
  if (n_ < 1) throw std::invalid_argument("StateVector: need at least one qubit");
  if (n_ > cap_) throw std::invalid_argument("StateVector: qubit cap exceeded");
  amp_.assign(std::size_t{1} << n_, Complex(0.0));
  amp_[0] = 1.0;
}

void StateVector::check_index(int qubit) const {
  if (qubit < 0 || qubit >= n_) throw std::out_of_range("StateVector: qubit index out of range");
}

void StateVector::apply(const GateOp& gate) {
  validate_gate(gate);
  std::visit(
      [this](const auto& g) {
        using T = std::decay_t<decltype(g)>;
        if constexpr (std::is_same_v<T, RyGate>) apply_ry(g);
        else if constexpr (std::is_same_v<T, SwapGate>) apply_swap(g);
        else if constexpr (std::is_same_v<T, ThreeQubitGate>) apply_three(g);
        else if constexpr (std::is_same_v<T, MultiControlledRyGate>) apply_mcry(g);
        else apply_fresh(g);
      },
      gate);
}

void StateVector::apply_ry(const RyGate& g) {
  check_index(g.target);
  const double c = std::cos(0.5 * g.angle);
  const double s = std::sin(0.5 * g.angle);
  const std::size_t bit = std::size_t{1} << g.target;
  const std::size_t dim = amp_.size();
  for (std::size_t i = 0; i < dim; ++i) {
    if (i & bit) continue;
    const Complex a0 = amp_[i];
    const Complex a1 = amp_[i | bit];
    amp_[i] = c * a0 - s * a1;
    amp_[i | bit] = s * a0 + c * a1;
  }
}

void StateVector::apply_swap(const SwapGate& g) {
  check_index(g.a);
  check_index(g.b);
  const std::size_t ba = std::size_t{1} << g.a;
  const std::size_t bb = std::size_t{1} << g.b;
  const std::size_t dim = amp_.size();
  for (std::size_t i = 0; i < dim; ++i) {
    if ((i & ba) && !(i & bb)) std::swap(amp_[i], amp_[(i ^ ba) | bb]);
  }
}

void StateVector::apply_three(const ThreeQubitGate& g) {
  for (int t : g.targets) check_index(t);
  const std::size_t b0 = std::size_t{1} << g.targets[0];
  const std::size_t b1 = std::size_t{1} << g.targets[1];
  const std::size_t b2 = std::size_t{1} << g.targets[2];
  const std::size_t mask = b0 | b1 | b2;
  const std::size_t dim = amp_.size();
  Complex in[8], out[8];
  for (std::size_t i = 0; i < dim; ++i) {
    if (i & mask) continue;  // visit each 8-amplitude block once
    for (int b = 0; b < 8; ++b) {
      std::size_t idx = i;
      if (b & 1) idx |= b0;
      if (b & 2) idx |= b1;
      if (b & 4) idx |= b2;
      in[b] = amp_[idx];
    }
    for (int r = 0; r < 8; ++r) {
      Complex s = 0.0;
      for (int c = 0; c < 8; ++c) s += g.matrix(r, c) * in[c];
      out[r] = s;
    }
    for (int b = 0; b < 8; ++b) {
      std::size_t idx = i;
      if (b & 1) idx |= b0;
      if (b & 2) idx |= b1;
      if (b & 4) idx |= b2;
      amp_[idx] = out[b];
    }
  }
}

void StateVector::apply_mcry(const MultiControlledRyGate& g) {
  check_index(g.target);
  for (const ControlBit& c : g.controls) check_index(c.qubit);
  std::size_t match_mask = 0, match_val = 0;
  for (const ControlBit& c : g.controls) {
    match_mask |= std::size_t{1} << c.qubit;
    if (c.polarity) match_val |= std::size_t{1} << c.qubit;
  }
  const double co = std::cos(0.5 * g.angle);
  const double si = std::sin(0.5 * g.angle);
  const std::size_t bit = std::size_t{1} << g.target;
  const std::size_t dim = amp_.size();
  for (std::size_t i = 0; i < dim; ++i) {
    if (i & bit) continue;
    if ((i & match_mask) != match_val) continue;
    const Complex a0 = amp_[i];
    const Complex a1 = amp_[i | bit];
    amp_[i] = co * a0 - si * a1;
    amp_[i | bit] = si * a0 + co * a1;
  }
}

void StateVector::apply_fresh(const PrepareFreshGate& g) {
  if (g.target != n_) {
    throw std::out_of_range("PrepareFresh: target must equal current qubit count");
  }
  if (n_ + 1 > cap_) throw std::invalid_argument("StateVector: qubit cap exceeded");
  const double a0 = std::sqrt(1.0 - g.f);
  const double a1 = std::sqrt(g.f);
  const std::size_t dim = amp_.size();
  std::vector<Complex> grown(dim * 2);
  for (std::size_t i = 0; i < dim; ++i) {
    grown[i] = a0 * amp_[i];
    grown[i + dim] = a1 * amp_[i];
  }
  amp_ = std::move(grown);
  ++n_;
}

double StateVector::marginal_prob_one(int qubit) const {
  check_index(qubit);
  const std::size_t bit = std::size_t{1} << qubit;
  double p = 0.0;
  const std::size_t dim = amp_.size();
  for (std::size_t i = 0; i < dim; ++i) {
    if (i & bit) p += std::norm(amp_[i]);
  }
  return p;
}

std::vector<double> StateVector::all_marginals() const {
  std::vector<double> p(n_, 0.0);
  const std::size_t dim = amp_.size();
  for (std::size_t i = 0; i < dim; ++i) {
    const double w = std::norm(amp_[i]);
    if (w == 0.0) continue;
    std::size_t bits = i;
    while (bits) {
      const int q = std::countr_zero(bits);
      p[q] += w;
      bits &= bits - 1;
    }
  }
  return p;
}

double StateVector::sample_shots(int qubit, std::uint64_t shots,
                                 std::uint64_t seed) const {
  if (shots == 0) throw std::invalid_argument("sample_shots: shots must be >= 1");
  const double p = marginal_prob_one(qubit);
  std::mt19937_64 rng(seed);
  std::binomial_distribution<std::uint64_t> dist(shots, std::min(1.0, std::max(0.0, p)));
  return static_cast<double>(dist(rng)) / static_cast<double>(shots);
}

double StateVector::norm() const {
  double s = 0.0;
  for (const Complex& z : amp_) s += std::norm(z);
  return std::sqrt(s);
}

}  // namespace qlbm
