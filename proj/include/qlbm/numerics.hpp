#pragma once
// Complex scalars, small unitary matrices, special functions, gate
// descriptors, and the D1Q3 collision unitary.

#include <array>
#include <complex>
#include <cstddef>
#include <stdexcept>
#include <variant>
#include <vector>

namespace qlbm {

using Complex = std::complex<double>;

// Dense square complex matrix, dim a power of two in [2, 16].
// Unitarity (max-entry deviation of U†U from I <= 1e-12) is enforced on
// construction; there is no way to hold a non-unitary instance.
class UnitaryMatrix {
 public:
  UnitaryMatrix(int dim, std::vector<Complex> row_major_entries);

  int dim() const { return dim_; }
  const Complex& operator()(int i, int j) const { return a_[i * dim_ + j]; }
  const std::vector<Complex>& entries() const { return a_; }

  // Max-entry deviation of U†U from the identity (diagnostic).
  double unitarity_defect() const;

 private:
  int dim_;
  std::vector<Complex> a_;
};

// ---------------------------------------------------------------------------
// Gate descriptors. Pure data; validated by the backends on application.

struct RyGate {
  int target;
  double angle;  // radians
};

struct SwapGate {
  int a;
  int b;
};

struct ThreeQubitGate {
  UnitaryMatrix matrix;  // dim 8; local basis index = b0 + 2*b1 + 4*b2
  std::array<int, 3> targets;
};

struct ControlBit {
  int qubit;
  int polarity;  // fires when the qubit reads this value (0 or 1)
};

struct MultiControlledRyGate {
  std::vector<ControlBit> controls;
  int target;
  double angle;
};

// Appends one fresh qubit (must target index n_qubits) prepared with
// P(|1>) = f, i.e. state sqrt(1-f)|0> + sqrt(f)|1>.
struct PrepareFreshGate {
  int target;
  double f;  // probability in [0,1]
};

using GateOp = std::variant<RyGate, SwapGate, ThreeQubitGate,
                            MultiControlledRyGate, PrepareFreshGate>;

// Throws std::invalid_argument on non-finite angles, out-of-range
// probabilities, or repeated qubit indices within one gate.
void validate_gate(const GateOp& gate);

// ---------------------------------------------------------------------------
// Collision unitary.
//
// 8x8 unitary on three qubits, block diagonal over Hamming-weight sectors:
// |000> and |111> are fixed; the weight-1 subspace span{1,2,4} carries
// V = J + e^{i theta}(I - J) with J the all-ones 3x3 matrix divided by 3
// (a projector); the weight-2 subspace span{3,5,6} carries P V P† where P
// flips all three bits -- equal to V since J and I are permutation
// invariant.
UnitaryMatrix build_collision_operator(double theta_mix);

// ---------------------------------------------------------------------------
// Error function. |erf(x) - reference| <= 1e-12 for |x| <= 6. The
// complement is evaluated independently in the tail (|x| > 2) so it keeps
// relative accuracy there; |erf(x) + erfc(x) - 1| <= 1e-15 everywhere.
double erf(double x);
double erfc(double x);

}  // namespace qlbm
