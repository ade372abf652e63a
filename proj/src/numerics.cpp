#include "qlbm/numerics.hpp"

#include <cmath>
#include <string>

namespace qlbm {

namespace {

bool is_power_of_two(int v) { return v > 0 && (v & (v - 1)) == 0; }

}  // namespace

UnitaryMatrix::UnitaryMatrix(int dim, std::vector<Complex> row_major_entries)
    : dim_(dim), a_(std::move(row_major_entries)) {
  if (!is_power_of_two(dim_) || dim_ < 2 || dim_ > 16) {
    throw std::invalid_argument("UnitaryMatrix: dim must be a power of two in [2,16]");
  }
  if (a_.size() != static_cast<size_t>(dim_) * dim_) {
    throw std::invalid_argument("UnitaryMatrix: entry count does not match dim");
  }
  for (const Complex& z : a_) {
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) {
      throw std::invalid_argument("UnitaryMatrix: non-finite entry");
    }
  }
  if (unitarity_defect() > 1e-12) {
    throw std::invalid_argument("UnitaryMatrix: not unitary to 1e-12");
  }
}

double UnitaryMatrix::unitarity_defect() const {
  double worst = 0.0;
  for (int i = 0; i < dim_; ++i) {
    for (int j = 0; j < dim_; ++j) {
      Complex s = 0.0;
      for (int k = 0; k < dim_; ++k) {
        s += std::conj((*this)(k, i)) * (*this)(k, j);
      }
      const double target = (i == j) ? 1.0 : 0.0;
      worst = std::max(worst, std::abs(s - target));
    }
  }
  return worst;
}

void validate_gate(const GateOp& gate) {
  auto check_finite = [](double v, const char* what) {
    if (!std::isfinite(v)) throw std::invalid_argument(std::string(what) + ": non-finite value");
  };
  std::visit(
      [&](const auto& g) {
        using T = std::decay_t<decltype(g)>;
        if constexpr (std::is_same_v<T, RyGate>) {
          check_finite(g.angle, "RyGate.angle");
          if (g.target < 0) throw std::invalid_argument("RyGate: negative target");
        } else if constexpr (std::is_same_v<T, SwapGate>) {
          if (g.a < 0 || g.b < 0) throw std::invalid_argument("SwapGate: negative index");
          if (g.a == g.b) throw std::invalid_argument("SwapGate: identical qubits");
        } else if constexpr (std::is_same_v<T, ThreeQubitGate>) {
          if (g.matrix.dim() != 8) throw std::invalid_argument("ThreeQubitGate: matrix dim must be 8");
          for (int t : g.targets)
            if (t < 0) throw std::invalid_argument("ThreeQubitGate: negative target");
          if (g.targets[0] == g.targets[1] || g.targets[0] == g.targets[2] ||
              g.targets[1] == g.targets[2]) {
            throw std::invalid_argument("ThreeQubitGate: repeated qubit index");
          }
        } else if constexpr (std::is_same_v<T, MultiControlledRyGate>) {
          check_finite(g.angle, "MultiControlledRyGate.angle");
          if (g.target < 0) throw std::invalid_argument("MultiControlledRyGate: negative target");
          for (size_t i = 0; i < g.controls.size(); ++i) {
            const ControlBit& c = g.controls[i];
            if (c.qubit < 0) throw std::invalid_argument("MultiControlledRyGate: negative control");
            if (c.polarity != 0 && c.polarity != 1) {
              throw std::invalid_argument("MultiControlledRyGate: polarity must be 0 or 1");
            }
            if (c.qubit == g.target) {
              throw std::invalid_argument("MultiControlledRyGate: control equals target");
            }
            for (size_t j = i + 1; j < g.controls.size(); ++j) {
              if (g.controls[j].qubit == c.qubit) {
                throw std::invalid_argument("MultiControlledRyGate: repeated control qubit");
              }
            }
          }
        } else if constexpr (std::is_same_v<T, PrepareFreshGate>) {
          if (g.target < 0) throw std::invalid_argument("PrepareFreshGate: negative target");
          if (!(g.f >= 0.0 && g.f <= 1.0)) {
            throw std::invalid_argument("PrepareFreshGate: f must lie in [0,1]");
          }
        }
      },
      gate);
}

UnitaryMatrix build_collision_operator(double theta_mix) {
  if (!std::isfinite(theta_mix)) {
    throw std::invalid_argument("build_collision_operator: non-finite theta");
  }
  // V = J + e^{i theta} (I - J) on a 3-dimensional subspace.
  const Complex phase = std::exp(Complex(0.0, theta_mix));
  std::array<std::array<Complex, 3>, 3> v{};
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      const double jij = 1.0 / 3.0;
      const double iij = (i == j) ? 1.0 : 0.0;
      v[i][j] = jij + phase * (iij - jij);
    }
  }

  std::vector<Complex> m(64, Complex(0.0));
  auto at = [&m](int r, int c) -> Complex& { return m[r * 8 + c]; };
  at(0, 0) = 1.0;
  at(7, 7) = 1.0;
  // Basis index b = b0 + 2 b1 + 4 b2; Hamming-weight-1 states {1,2,4},
  // weight-2 states {3,5,6} listed as bit complements of the weight-1 order,
  // so the weight-2 block is P V P† = V (permutation invariance of J, I).
  const std::array<int, 3> w1 = {1, 2, 4};
  const std::array<int, 3> w2 = {6, 5, 3};
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      at(w1[i], w1[j]) = v[i][j];
      at(w2[i], w2[j]) = v[i][j];
    }
  }
  return UnitaryMatrix(8, std::move(m));
}

// ---------------------------------------------------------------------------
// erf / erfc.
//
// |x| <= 2: Maclaurin series erf(x) = 2/sqrt(pi) sum (-1)^n x^{2n+1}/(n!(2n+1)),
// summed until terms fall below 1e-18 relative; erfc = 1 - erf.
// |x| > 2: Lentz continued fraction for erfc,
//   erfc(x) = exp(-x^2)/sqrt(pi) * 1/(x + 1/(2x + 2/(x + 3/(2x + ...)))),
// and erf = 1 - erfc. Both halves keep erfc(x) = 1 - erf(x) exact.

namespace {

constexpr double kTwoOverSqrtPi = 1.1283791670955125738961589031;
constexpr double kOneOverSqrtPi = 0.5641895835477562869480794516;

double erf_series(double x) {
  const double x2 = x * x;
  double term = x;       // x^{2n+1} / n!
  double sum = term;     // running sum of term / (2n+1), with term/(2*0+1)=x
  for (int n = 1; n < 200; ++n) {
    term *= -x2 / n;
    const double add = term / (2 * n + 1);
    sum += add;
    if (std::abs(add) < 1e-18 * std::abs(sum)) break;
  }
  return kTwoOverSqrtPi * sum;
}

double erfc_continued_fraction(double x) {
  // Modified Lentz evaluation of the Laplace continued fraction.
  const double tiny = 1e-300;
  double f = x, c = x, d = 0.0;
  for (int n = 1; n < 300; ++n) {
    const double a = 0.5 * n;  // partial numerators 1/2, 1, 3/2, ... over b=x
    // Even steps use b = x, odd steps alternate; the standard form
    // 1/(x + (1/2)/(x + 1/(x + (3/2)/(x + ...)))) uses b = x throughout
    // with numerators n/2.
    d = x + a * d;
    if (std::abs(d) < tiny) d = tiny;
    c = x + a / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double delta = c * d;
    f *= delta;
    if (std::abs(delta - 1.0) < 1e-17) break;
  }
  return kOneOverSqrtPi * std::exp(-x * x) / f;
}

}  // namespace

double erf(double x) {
  if (!std::isfinite(x)) throw std::invalid_argument("erf: non-finite argument");
  if (x < 0) return -erf(-x);
  if (x <= 2.0) return erf_series(x);
  return 1.0 - erfc_continued_fraction(x);
}

double erfc(double x) {
  if (!std::isfinite(x)) throw std::invalid_argument("erfc: non-finite argument");
  if (x < 0) return 2.0 - erfc(-x);
  if (x <= 2.0) return 1.0 - erf_series(x);
  return erfc_continued_fraction(x);
}

}  // namespace qlbm
