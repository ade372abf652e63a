#pragma once
// Pure construction of gate programs for lattice time steps: encoding,
// collision placement, streaming permutation, boundary injection, and the
// multi-controlled-Ry interface gadget. No execution here.

#include <array>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "qlbm/numerics.hpp"

namespace qlbm {

// Site-major qubit layout: lattice site k owns qubits 3k..3k+2 holding the
// direction triple (rest, left-moving, right-moving).
struct LatticeLayout {
  int n_sites;
  static int qubit_of(int site, int direction) { return 3 * site + direction; }
  int n_lattice_qubits() const { return 3 * n_sites; }
};

struct StepProgram {
  std::vector<GateOp> gates;
  // Index of the ancilla that encodes the interface temperature this step.
  std::optional<int> interface_ancilla;
  // Qubit count after executing the program (fresh qubits included).
  int total_qubits = 0;
};

// Context for assembling one full time step on one register.
struct StepContext {
  LatticeLayout layout;
  // Marginals to encode at the start of the step; nullopt on no-reinit steps.
  std::optional<std::vector<std::array<double, 3>>> encode_field;
  // Injection values for the slots vacated by streaming. nullopt = slot is
  // left untouched (closed end not modelled; callers always supply both for
  // physical runs).
  std::optional<double> left_f2_injection;   // fills f_2 of site 0
  std::optional<double> right_f1_injection;  // fills f_1 of site n-1
  // Site whose temperature is read into a fresh ancilla, if any.
  std::optional<int> interface_site;
  // Qubit count of the target state before this step (lattice + any ancillas
  // accumulated since the last reinitialization).
  int base_qubits = 0;
  double collision_theta = 2.0 * M_PI / 3.0;
};

// theta = 2*arcsin(sqrt(f)), the Ry angle that prepares P(|1>) = f.
// Throws std::invalid_argument for f outside [0,1].
double encoding_angle(double f);

// Ancilla rotation angle for control sum S in {0,1,2,3}: 2*arcsin(sqrt(S/3)).
double mcry_angle(int S);

// One Ry per (site, direction) in site-major order; zero angles omitted.
std::vector<GateOp> build_encoding(const std::vector<std::array<double, 3>>& field);

// Swap cascades realizing f1(k) <- f1(k+1) and f2(k+1) <- f2(k); the vacated
// end slots (f1 of the last site, f2 of site 0) are filled separately by
// boundary injection.
std::vector<GateOp> build_streaming(const LatticeLayout& layout);

// The 7 multi-controlled Ry gates (all nonzero control patterns over the
// site's three qubits) targeting a fresh ancilla; for product-state controls
// the ancilla ends with P(1) = (f0+f1+f2)/3.
std::vector<GateOp> build_mcry(const LatticeLayout& layout, int interface_site,
                               int ancilla);

// Full step: [encoding] + per-site collision + streaming + boundary
// injection + [mcry].
StepProgram build_step(const StepContext& ctx);

// Line-per-gate text listing for debugging and golden-file tests.
std::string to_text(const StepProgram& program);

}  // namespace qlbm
