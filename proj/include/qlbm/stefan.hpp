#pragma once
// Closed-form two-phase Stefan solution on a finite slab: transcendental
// root for the interface rate, interface trajectory, and the liquid/solid
// temperature profiles.

#include <stdexcept>

namespace qlbm {

struct StefanParams {
  double St_liq;          // liquid Stefan number, cp*(T_bound - T_melt)/L
  double St_solid;        // solid Stefan number, cp*(T_melt - T_solid)/L
  double alpha;           // diffusivity
  double L_domain;        // slab length
  double T_bound;
  double T_melt;
  double T_solid;
  int n_series_terms = 10;

  void validate() const {
    if (!(St_liq > 0.0)) throw std::invalid_argument("StefanParams: St_liq must be positive");
    if (St_solid < 0.0) throw std::invalid_argument("StefanParams: St_solid must be nonnegative");
    if (n_series_terms < 1) throw std::invalid_argument("StefanParams: need at least one series term");
  }
};

struct LambdaSolution {
  double lambda;
  double residual;
};

// Root of  lambda*sqrt(pi) = St_liq/(exp(l^2) erf(l)) - St_solid/(exp(l^2) erfc(l)),
// found by bisection on [1e-8, 5]; |residual| <= 1e-10. Throws
// std::domain_error when the bracket shows no sign change (no melting
// regime).
LambdaSolution solve_lambda(const StefanParams& p);

// x_I(t) = 2 lambda sqrt(alpha t).
double interface_position(double lambda, double alpha, double t);

// T_bound - (T_bound - T_melt) * erf(x / (2 sqrt(alpha t))) / erf(lambda),
// valid for 0 <= x <= x_I(t), t > 0.
double liquid_temperature(double x, double t, const StefanParams& p, double lambda);

// Pure-conduction transient on [0, L_domain] between T_melt and T_solid,
// truncated sine series with n_series_terms terms.
double solid_temperature(double x, double t, const StefanParams& p);

}  // namespace qlbm
