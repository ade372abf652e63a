#include "qlbm/stefan.hpp"

#include <cmath>

#include "qlbm/numerics.hpp"

namespace qlbm {

namespace {

constexpr double kSqrtPi = 1.7724538509055160272981674833;

double lambda_residual(double l, const StefanParams& p) {
  const double e = std::exp(l * l);
  return l * kSqrtPi - p.St_liq / (e * qlbm::erf(l)) + p.St_solid / (e * qlbm::erfc(l));
}

}  // namespace

LambdaSolution solve_lambda(const StefanParams& p) {
  p.validate();
  double lo = 1e-8, hi = 5.0;
  double flo = lambda_residual(lo, p);
  double fhi = lambda_residual(hi, p);
  if (flo * fhi > 0.0) {
    throw std::domain_error("solve_lambda: no sign change in bracket (no melting regime)");
  }
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double fm = lambda_residual(mid, p);
    if ((flo <= 0.0) == (fm <= 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
      fhi = fm;
    }
    if (std::abs(fm) <= 1e-12) break;
  }
  const double lambda = 0.5 * (lo + hi);
  return {lambda, lambda_residual(lambda, p)};
}

double interface_position(double lambda, double alpha, double t) {
  if (t < 0.0) throw std::invalid_argument("interface_position: negative time");
  return 2.0 * lambda * std::sqrt(alpha * t);
}

double liquid_temperature(double x, double t, const StefanParams& p, double lambda) {
  if (t <= 0.0) {
    if (x > 0.0) throw std::invalid_argument("liquid_temperature: t must be positive for x > 0");
    return p.T_bound;
  }
  const double arg = x / (2.0 * std::sqrt(p.alpha * t));
  return p.T_bound - (p.T_bound - p.T_melt) * qlbm::erf(arg) / qlbm::erf(lambda);
}

double solid_temperature(double x, double t, const StefanParams& p) {
  const double pi = 3.14159265358979323846;
  double series = x / p.L_domain;
  for (int n = 1; n <= p.n_series_terms; ++n) {
    const double k = n * pi / p.L_domain;
    series += (2.0 / (n * pi)) * std::sin(k * x) * std::exp(-p.alpha * k * k * t);
  }
  return p.T_melt - (p.T_melt - p.T_solid) * series;
}

}  // namespace qlbm
