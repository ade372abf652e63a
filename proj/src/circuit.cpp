#include "qlbm/circuit.hpp"

#include <bit>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace qlbm {

double encoding_angle(double f) {
  if (!(f >= 0.0 && f <= 1.0)) {
    throw std::invalid_argument("encoding_angle: f must lie in [0,1]");
  }
  return 2.0 * std::asin(std::sqrt(f));
}

double mcry_angle(int S) {
  if (S < 0 || S > 3) throw std::invalid_argument("mcry_angle: S must be in 0..3");
  return 2.0 * std::asin(std::sqrt(S / 3.0));
}

std::vector<GateOp> build_encoding(const std::vector<std::array<double, 3>>& field) {
  std::vector<GateOp> out;
  for (std::size_t k = 0; k < field.size(); ++k) {
    for (int i = 0; i < 3; ++i) {
      const double angle = encoding_angle(field[k][i]);
      if (angle != 0.0) {
        out.push_back(RyGate{LatticeLayout::qubit_of(static_cast<int>(k), i), angle});
      }
    }
  }
  return out;
}

std::vector<GateOp> build_streaming(const LatticeLayout& layout) {
  if (layout.n_sites < 2) {
    throw std::invalid_argument("build_streaming: need at least two sites");
  }
  std::vector<GateOp> out;
  // Left-moving values shift one site down: pull from the right, so the
  // cascade runs left to right.
  for (int k = 0; k + 1 < layout.n_sites; ++k) {
    out.push_back(SwapGate{LatticeLayout::qubit_of(k, 1),
                           LatticeLayout::qubit_of(k + 1, 1)});
  }
  // Right-moving values shift one site up: cascade runs right to left.
  for (int k = layout.n_sites - 2; k >= 0; --k) {
    out.push_back(SwapGate{LatticeLayout::qubit_of(k, 2),
                           LatticeLayout::qubit_of(k + 1, 2)});
  }
  return out;
}

std::vector<GateOp> build_mcry(const LatticeLayout& layout, int interface_site,
                               int ancilla) {
  if (interface_site < 0 || interface_site >= layout.n_sites) {
    throw std::invalid_argument("build_mcry: interface site out of range");
  }
  std::vector<GateOp> out;
  for (int pattern = 1; pattern < 8; ++pattern) {
    MultiControlledRyGate g;
    for (int i = 0; i < 3; ++i) {
      g.controls.push_back(
          ControlBit{LatticeLayout::qubit_of(interface_site, i), (pattern >> i) & 1});
    }
    g.target = ancilla;
    g.angle = mcry_angle(std::popcount(static_cast<unsigned>(pattern)));
    out.push_back(std::move(g));
  }
  return out;
}

StepProgram build_step(const StepContext& ctx) {
  StepProgram prog;
  int next_qubit = std::max(ctx.base_qubits, ctx.layout.n_lattice_qubits());

  if (ctx.encode_field) {
    if (static_cast<int>(ctx.encode_field->size()) != ctx.layout.n_sites) {
      throw std::invalid_argument("build_step: encode field size mismatch");
    }
    auto enc = build_encoding(*ctx.encode_field);
    prog.gates.insert(prog.gates.end(), enc.begin(), enc.end());
  }

  const UnitaryMatrix uc = build_collision_operator(ctx.collision_theta);
  for (int k = 0; k < ctx.layout.n_sites; ++k) {
    prog.gates.push_back(ThreeQubitGate{
        uc,
        {LatticeLayout::qubit_of(k, 0), LatticeLayout::qubit_of(k, 1),
         LatticeLayout::qubit_of(k, 2)}});
  }

  auto stream = build_streaming(ctx.layout);
  prog.gates.insert(prog.gates.end(), stream.begin(), stream.end());

  if (ctx.left_f2_injection) {
    prog.gates.push_back(PrepareFreshGate{next_qubit, *ctx.left_f2_injection});
    prog.gates.push_back(SwapGate{next_qubit, LatticeLayout::qubit_of(0, 2)});
    ++next_qubit;
  }
  if (ctx.right_f1_injection) {
    prog.gates.push_back(PrepareFreshGate{next_qubit, *ctx.right_f1_injection});
    prog.gates.push_back(
        SwapGate{next_qubit, LatticeLayout::qubit_of(ctx.layout.n_sites - 1, 1)});
    ++next_qubit;
  }

  if (ctx.interface_site) {
    const int ancilla = next_qubit++;
    prog.gates.push_back(PrepareFreshGate{ancilla, 0.0});
    auto mcry = build_mcry(ctx.layout, *ctx.interface_site, ancilla);
    prog.gates.insert(prog.gates.end(), mcry.begin(), mcry.end());
    prog.interface_ancilla = ancilla;
  }

  prog.total_qubits = next_qubit;
  for (const GateOp& g : prog.gates) validate_gate(g);
  return prog;
}

std::string to_text(const StepProgram& program) {
  std::ostringstream os;
  for (const GateOp& gate : program.gates) {
    std::visit(
        [&os](const auto& g) {
          using T = std::decay_t<decltype(g)>;
          if constexpr (std::is_same_v<T, RyGate>) {
            os << "ry q" << g.target << " angle " << g.angle << "\n";
          } else if constexpr (std::is_same_v<T, SwapGate>) {
            os << "swap q" << g.a << " q" << g.b << "\n";
          } else if constexpr (std::is_same_v<T, ThreeQubitGate>) {
            os << "u3q q" << g.targets[0] << " q" << g.targets[1] << " q"
               << g.targets[2] << "\n";
          } else if constexpr (std::is_same_v<T, MultiControlledRyGate>) {
            os << "mcry";
            for (const ControlBit& c : g.controls) {
              os << " " << (c.polarity ? "c1" : "c0") << ":q" << c.qubit;
            }
            os << " -> q" << g.target << " angle " << g.angle << "\n";
          } else {
            os << "fresh q" << g.target << " p1 " << g.f << "\n";
          }
        },
        gate);
  }
  return os.str();
}

}  // namespace qlbm
