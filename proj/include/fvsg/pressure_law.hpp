#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>

#include "fvsg/errors.hpp"

namespace fvsg {

// Power-law pressure r(s) = s^gamma, gamma >= 1, together with the derived
// functions used by the schemes:
//   h(s) = int_1^s r'(t)/t dt        (enthalpy)
//   H(s) = int_1^s h(t) dt
//   g    = generalized inverse of h  (g(s) = 0 below h(0+))
// All in closed form. gamma = 1 is the linear case (h = log, g = exp);
// gamma > 1 is degenerate at the origin: r(0) = r'(0) = 0.
class PressureLaw {
 public:
  explicit PressureLaw(double gamma = 1.0) : gamma_(gamma) {
    if (!(gamma >= 1.0) || !std::isfinite(gamma))
      throw std::invalid_argument("PressureLaw: gamma must be >= 1");
  }

  double gamma() const { return gamma_; }
  bool linear() const { return gamma_ == 1.0; }

  double r(double s) const {
    if (gamma_ == 1.0) return s;
    if (gamma_ == 2.0) return s * s;
    if (gamma_ == 3.0) return s * s * s;
    return std::pow(s, gamma_);
  }

  double r_prime(double s) const {
    if (gamma_ == 1.0) return 1.0;
    if (gamma_ == 2.0) return 2.0 * s;
    if (gamma_ == 3.0) return 3.0 * s * s;
    return gamma_ * std::pow(s, gamma_ - 1.0);
  }

  // s^{gamma-1}
  double pow_gm1(double s) const {
    if (gamma_ == 1.0) return 1.0;
    if (gamma_ == 2.0) return s;
    if (gamma_ == 3.0) return s * s;
    return std::pow(s, gamma_ - 1.0);
  }

  // h(s). For gamma > 1, h(0) is the finite limit -gamma/(gamma-1); for
  // gamma = 1, h(0) = -inf and s = 0 is rejected.
  double enthalpy(double s) const {
    check_nonneg(s, "enthalpy");
    if (gamma_ == 1.0) {
      if (s == 0.0) throw std::invalid_argument("enthalpy: h(0) = -inf for gamma = 1");
      return std::log(s);
    }
    return gamma_ / (gamma_ - 1.0) * (pow_gm1(s) - 1.0);
  }

  // h(0+)
  double enthalpy_zero_limit() const {
    if (gamma_ == 1.0) return -std::numeric_limits<double>::infinity();
    return -gamma_ / (gamma_ - 1.0);
  }

  // H(s); H(1) = 0, H(0) = 1 (continuous extension for gamma = 1).
  double primitive(double s) const {
    check_nonneg(s, "primitive");
    if (gamma_ == 1.0) return s == 0.0 ? 1.0 : s * std::log(s) - s + 1.0;
    return (r(s) - 1.0 - gamma_ * (s - 1.0)) / (gamma_ - 1.0);
  }

  // g(s): inverse of h on (h(0+), inf), clamped to 0 at and below h(0+).
  double g_inverse(double s) const {
    if (gamma_ == 1.0) return std::exp(s);
    const double t = 1.0 + (gamma_ - 1.0) / gamma_ * s;
    if (t <= 0.0) return 0.0;
    if (gamma_ == 2.0) return t;
    return std::pow(t, 1.0 / (gamma_ - 1.0));
  }

  // One-sided derivative of g (0 below the clamp point).
  double g_inverse_prime(double s) const {
    if (gamma_ == 1.0) return std::exp(s);
    const double t = 1.0 + (gamma_ - 1.0) / gamma_ * s;
    if (t <= 0.0) return 0.0;
    if (gamma_ == 2.0) return 0.5;
    return 1.0 / gamma_ * std::pow(t, (2.0 - gamma_) / (gamma_ - 1.0));
  }

 private:
  static void check_nonneg(double s, const char* who) {
    if (!(s >= 0.0))
      throw std::invalid_argument(std::string(who) + ": negative argument");
  }

  double gamma_;
};

// Bernoulli function B(x) = x/(e^x - 1), B(0) = 1. Three branches keep it
// overflow- and cancellation-free over the whole double range:
//   |x| <  1e-4 : truncated series, truncation error ~ x^6/30240
//   x   >  0    : x e^{-x} / (1 - e^{-x})
//   x   <  0    : x / expm1(x)
inline double bernoulli(double x) {
  const double ax = std::abs(x);
  if (ax < 1e-4) {
    const double x2 = x * x;
    return 1.0 - x / 2.0 + x2 / 12.0 - x2 * x2 / 720.0;
  }
  if (x > 0.0) return x * std::exp(-x) / (-std::expm1(-x));
  return x / std::expm1(x);
}

// Edge diffusion coefficient, arithmetic-average variant: r'((a+b)/2).
inline double dr_midpoint(const PressureLaw& law, double a, double b) {
  if (!(a >= 0.0) || !(b >= 0.0))
    throw std::invalid_argument("dr_midpoint: negative argument");
  return law.r_prime(0.5 * (a + b));
}

// Edge diffusion coefficient, logarithmic-mean variant:
//   dr(a,b) = (h(b) - h(a)) / (log b - log a)   if ab > 0 and a != b,
//             r'((a+b)/2)                        elsewhere,
// with the average branch also taken for |log b - log a| < 1e-8 (the limit
// value, avoids 0/0). Evaluated as r'(a) * expm1(x)/x with
// x = (gamma-1) log(b/a), which is stable for nearby arguments and keeps the
// mean-value bracket r'(min) <= dr <= r'(max) to roundoff.
inline double dr_log_mean(const PressureLaw& law, double a, double b) {
  if (!(a >= 0.0) || !(b >= 0.0))
    throw std::invalid_argument("dr_log_mean: negative argument");
  if (a * b == 0.0 || a == b) return law.r_prime(0.5 * (a + b));
  if (a > b) std::swap(a, b);  // bitwise symmetry
  const double L = std::log(b / a);
  if (std::abs(L) < 1e-8) return law.r_prime(0.5 * (a + b));
  if (law.linear()) return 1.0;  // h = log
  const double x = (law.gamma() - 1.0) * L;
  return law.gamma() * law.pow_gm1(a) * (std::expm1(x) / x);
}

}  // namespace fvsg
