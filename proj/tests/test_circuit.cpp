// Unit tests for gate-program construction: encoding angles, streaming
// permutation, boundary injection, the interface readout gadget, and full
// step assembly.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <vector>

#include "qlbm/circuit.hpp"
#include "qlbm/numerics.hpp"
#include "qlbm/statevector.hpp"

using namespace qlbm;

namespace {

const double kPi = 3.14159265358979323846;

StateVector encode_on_statevector(const std::vector<std::array<double, 3>>& field) {
  StateVector sv(3 * static_cast<int>(field.size()));
  for (const GateOp& g : build_encoding(field)) sv.apply(g);
  return sv;
}

}  // namespace

TEST_CASE("encoding angle inverts the population map") {
  CHECK(encoding_angle(0.0) == 0.0);
  CHECK(encoding_angle(1.0) == doctest::Approx(kPi).epsilon(1e-15));
  CHECK(encoding_angle(0.25) == doctest::Approx(2.0 * std::asin(0.5)).epsilon(1e-15));
  CHECK_THROWS_AS(encoding_angle(-0.01), std::invalid_argument);
  CHECK_THROWS_AS(encoding_angle(1.01), std::invalid_argument);
  // sin^2(theta/2) must reproduce f.
  for (double f : {0.1, 0.37, 0.5, 0.93}) {
    const double half = 0.5 * encoding_angle(f);
    CHECK(std::sin(half) * std::sin(half) == doctest::Approx(f).epsilon(1e-14));
  }
}

TEST_CASE("ancilla angle encodes a third of the control sum") {
  CHECK(mcry_angle(0) == 0.0);
  CHECK(mcry_angle(3) == doctest::Approx(kPi).epsilon(1e-15));
  for (int s : {1, 2}) {
    const double half = 0.5 * mcry_angle(s);
    CHECK(std::sin(half) * std::sin(half) == doctest::Approx(s / 3.0).epsilon(1e-14));
  }
}

TEST_CASE("encoding emits one rotation per populated slot and reproduces the field") {
  const std::vector<std::array<double, 3>> field = {
      {0.5, 0.2, 0.1}, {0.0, 0.3, 0.4}, {0.6, 0.0, 0.0}};
  const auto gates = build_encoding(field);
  CHECK(gates.size() == 6);  // three zero slots omitted
  StateVector sv = encode_on_statevector(field);
  for (int k = 0; k < 3; ++k) {
    for (int d = 0; d < 3; ++d) {
      CHECK(sv.marginal_prob_one(LatticeLayout::qubit_of(k, d)) ==
            doctest::Approx(field[k][d]).epsilon(1e-13));
    }
  }
}

TEST_CASE("streaming shifts direction populations one site") {
  const std::vector<std::array<double, 3>> field = {
      {0.10, 0.21, 0.31}, {0.12, 0.22, 0.32}, {0.14, 0.23, 0.33}, {0.16, 0.24, 0.34}};
  StateVector sv = encode_on_statevector(field);
  for (const GateOp& g : build_streaming(LatticeLayout{4})) sv.apply(g);
  // Rest populations stay; f1 pulls from the right, f2 pushes to the right.
  for (int k = 0; k < 4; ++k) {
    CHECK(sv.marginal_prob_one(LatticeLayout::qubit_of(k, 0)) ==
          doctest::Approx(field[k][0]).epsilon(1e-13));
  }
  for (int k = 0; k < 3; ++k) {
    CHECK(sv.marginal_prob_one(LatticeLayout::qubit_of(k, 1)) ==
          doctest::Approx(field[k + 1][1]).epsilon(1e-13));
    CHECK(sv.marginal_prob_one(LatticeLayout::qubit_of(k + 1, 2)) ==
          doctest::Approx(field[k][2]).epsilon(1e-13));
  }
  // Vacated slots now hold the populations that streamed off each end.
  CHECK(sv.marginal_prob_one(LatticeLayout::qubit_of(3, 1)) ==
        doctest::Approx(field[0][1]).epsilon(1e-13));
  CHECK(sv.marginal_prob_one(LatticeLayout::qubit_of(0, 2)) ==
        doctest::Approx(field[3][2]).epsilon(1e-13));
}

TEST_CASE("two streaming passes shift by two sites") {
  const std::vector<std::array<double, 3>> field = {
      {0.0, 0.11, 0.41}, {0.0, 0.12, 0.42}, {0.0, 0.13, 0.43}, {0.0, 0.14, 0.44}};
  StateVector sv = encode_on_statevector(field);
  const auto stream = build_streaming(LatticeLayout{4});
  for (int pass = 0; pass < 2; ++pass) {
    for (const GateOp& g : stream) sv.apply(g);
  }
  CHECK(sv.marginal_prob_one(LatticeLayout::qubit_of(0, 1)) ==
        doctest::Approx(field[2][1]).epsilon(1e-13));
  CHECK(sv.marginal_prob_one(LatticeLayout::qubit_of(3, 2)) ==
        doctest::Approx(field[1][2]).epsilon(1e-13));
}

TEST_CASE("interface gadget reads a third of the site temperature") {
  for (const auto& f : std::vector<std::array<double, 3>>{
           {0.2, 0.3, 0.4}, {0.0, 0.0, 0.0}, {1.0, 1.0, 1.0}, {0.9, 0.05, 0.0}}) {
    const std::vector<std::array<double, 3>> field = {{0.1, 0.1, 0.1}, f};
    StateVector sv = encode_on_statevector(field);
    const int ancilla = 6;
    sv.apply(PrepareFreshGate{ancilla, 0.0});
    for (const GateOp& g : build_mcry(LatticeLayout{2}, 1, ancilla)) sv.apply(g);
    const double T = f[0] + f[1] + f[2];
    CHECK(sv.marginal_prob_one(ancilla) == doctest::Approx(T / 3.0).epsilon(1e-10));
  }
}

TEST_CASE("interface gadget emits the seven control patterns") {
  const auto gates = build_mcry(LatticeLayout{3}, 1, 9);
  REQUIRE(gates.size() == 7);
  int seen_patterns = 0;
  for (const GateOp& g : gates) {
    const auto& m = std::get<MultiControlledRyGate>(g);
    REQUIRE(m.controls.size() == 3);
    CHECK(m.target == 9);
    int pattern = 0, weight = 0;
    for (int i = 0; i < 3; ++i) {
      CHECK(m.controls[i].qubit == LatticeLayout::qubit_of(1, i));
      pattern |= m.controls[i].polarity << i;
      weight += m.controls[i].polarity;
    }
    seen_patterns |= 1 << pattern;
    CHECK(m.angle == doctest::Approx(2.0 * std::asin(std::sqrt(weight / 3.0)))
                         .epsilon(1e-14));
  }
  CHECK(seen_patterns == 0xFE);  // patterns 1..7, never the all-zero one
  CHECK_THROWS_AS(build_mcry(LatticeLayout{3}, 3, 9), std::invalid_argument);
}

TEST_CASE("full step assembles encoding, collisions, streaming, injections") {
  StepContext ctx;
  ctx.layout = LatticeLayout{2};
  ctx.base_qubits = 6;
  ctx.encode_field = std::vector<std::array<double, 3>>{{0.3, 0.2, 0.1}, {0.3, 0.2, 0.1}};
  ctx.left_f2_injection = 0.7;
  ctx.right_f1_injection = 0.05;
  const StepProgram prog = build_step(ctx);

  int n_ry = 0, n_three = 0, n_swap = 0, n_fresh = 0, n_mcry = 0;
  for (const GateOp& g : prog.gates) {
    switch (g.index()) {
      case 0: ++n_ry; break;
      case 1: ++n_swap; break;
      case 2: ++n_three; break;
      case 3: ++n_mcry; break;
      default: ++n_fresh; break;
    }
  }
  CHECK(n_ry == 6);
  CHECK(n_three == 2);           // one collision block per site
  CHECK(n_swap == 1 + 1 + 2);    // two streaming cascades + two injections
  CHECK(n_fresh == 2);
  CHECK(n_mcry == 0);
  CHECK(prog.total_qubits == 8);
  CHECK_FALSE(prog.interface_ancilla.has_value());
}

TEST_CASE("full step with an interface site appends a readable ancilla") {
  StepContext ctx;
  ctx.layout = LatticeLayout{3};
  ctx.base_qubits = 9;
  ctx.left_f2_injection = 0.4;
  ctx.right_f1_injection = 0.0;
  ctx.interface_site = 1;
  const StepProgram prog = build_step(ctx);
  REQUIRE(prog.interface_ancilla.has_value());
  CHECK(*prog.interface_ancilla == 11);  // after the two injection qubits
  CHECK(prog.total_qubits == 12);

  StateVector sv(9);
  for (const GateOp& g : prog.gates) sv.apply(g);
  CHECK(sv.n_qubits() == 12);
  // Zero field in, zero temperature out.
  CHECK(sv.marginal_prob_one(11) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("a uniform equilibrium field is a fixed point of one full step") {
  const double f = 0.28;
  StepContext ctx;
  ctx.layout = LatticeLayout{4};
  ctx.base_qubits = 12;
  ctx.encode_field = std::vector<std::array<double, 3>>(4, {f, f, f});
  ctx.left_f2_injection = f;
  ctx.right_f1_injection = f;
  const StepProgram prog = build_step(ctx);
  StateVector sv(12);
  for (const GateOp& g : prog.gates) sv.apply(g);
  for (int k = 0; k < 4; ++k) {
    for (int d = 0; d < 3; ++d) {
      CHECK(sv.marginal_prob_one(LatticeLayout::qubit_of(k, d)) ==
            doctest::Approx(f).epsilon(1e-10));
    }
  }
}

TEST_CASE("gate listing names every operation") {
  StepContext ctx;
  ctx.layout = LatticeLayout{2};
  ctx.base_qubits = 6;
  ctx.left_f2_injection = 0.5;
  const std::string text = to_text(build_step(ctx));
  CHECK(text.find("u3q") != std::string::npos);
  CHECK(text.find("swap") != std::string::npos);
  CHECK(text.find("fresh") != std::string::npos);
}
