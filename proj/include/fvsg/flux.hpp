#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>

#include "fvsg/errors.hpp"
#include "fvsg/pressure_law.hpp"

namespace fvsg {

// The five numerical edge fluxes. The SG family is linear in U^{n+1} (one
// sparse solve per step); the upwind family needs Newton.
enum class FluxKind {
  classical_upwind,   // two-point r-difference + upwinded convection
  nonlinear_upwind,   // min(U) * Dh(U) diffusion + upwinded convection
  sg_classic,         // Scharfetter-Gummel, linear pressure only
  sg_ext_midpoint,    // SG extension, dr = r'((a+b)/2)
  sg_ext_log_mean,    // SG extension, dr = (h(b)-h(a))/(log b - log a)
};

inline bool sg_family(FluxKind k) {
  return k == FluxKind::sg_classic || k == FluxKind::sg_ext_midpoint ||
         k == FluxKind::sg_ext_log_mean;
}
inline bool upwind_family(FluxKind k) { return !sg_family(k); }

inline const char* flux_name(FluxKind k) {
  switch (k) {
    case FluxKind::classical_upwind: return "upwind";
    case FluxKind::nonlinear_upwind: return "nlupwind";
    case FluxKind::sg_classic: return "sg";
    case FluxKind::sg_ext_midpoint: return "sg_jp";
    case FluxKind::sg_ext_log_mean: return "sg_ext";
  }
  return "?";
}

inline FluxKind parse_flux_name(const std::string& s) {
  if (s == "upwind") return FluxKind::classical_upwind;
  if (s == "nlupwind") return FluxKind::nonlinear_upwind;
  if (s == "sg") return FluxKind::sg_classic;
  if (s == "sg_jp") return FluxKind::sg_ext_midpoint;
  if (s == "sg_ext") return FluxKind::sg_ext_log_mean;
  throw ConfigError("unknown flux name: " + s);
}

struct FluxModel {
  FluxKind kind = FluxKind::sg_ext_log_mean;
  PressureLaw law{1.0};
  // sg_classic treats this as the viscosity eps in eps*B(+-d q/eps); it must
  // be set explicitly when the pressure is not linear.
  std::optional<double> viscosity;

  void validate() const {
    if (kind == FluxKind::sg_classic && !law.linear() && !viscosity)
      throw ConfigError("sg_classic flux needs gamma = 1 or an explicit viscosity");
    if (viscosity && !(*viscosity > 0.0))
      throw ConfigError("viscosity must be positive");
  }

  double sg_classic_eps() const { return viscosity.value_or(1.0); }

  // dr(a, b) for the SG-ext variants; sg_classic has a constant coefficient.
  double dr(double a, double b) const {
    switch (kind) {
      case FluxKind::sg_ext_midpoint: return dr_midpoint(law, a, b);
      case FluxKind::sg_ext_log_mean: return dr_log_mean(law, a, b);
      case FluxKind::sg_classic: return sg_classic_eps();
      default: throw ConfigError("dr undefined for upwind-family fluxes");
    }
  }
};

// Linear-in-U^{n+1} decomposition of an SG-family flux:
//   F_{K,sigma} = tau * (coef_k * U_K - coef_nb * U_nb) + affine,
// with coefficients depending on time-n data only. affine stays 0 for the
// whole SG family (the Dirichlet trace plays the U_nb role).
struct EdgeCoefficients {
  double coef_k = 0.0;
  double coef_nb = 0.0;
  double affine = 0.0;
};

// Below this (relative to |d q|) the Bernoulli form would divide by ~0; the
// flux then takes its exact limit, the upwind transport flux.
inline constexpr double kDegenerateDr = 1e-14;

inline EdgeCoefficients sg_coefficients_from_dr(double drn, double q, double d) {
  const double qd = d * q;
  if (!(drn >= kDegenerateDr * std::max(1.0, std::abs(qd))))
    return {qd > 0.0 ? qd : 0.0, qd < 0.0 ? -qd : 0.0, 0.0};
  const double x = qd / drn;
  return {drn * bernoulli(-x), drn * bernoulli(x), 0.0};
}

// SG-ext coefficients (dr frozen at time n):
//   coef_k  = dr^n B(-d q / dr^n),  coef_nb = dr^n B(d q / dr^n),
// degenerating to (d q^+, d q^-) when dr^n vanishes.
inline EdgeCoefficients sg_ext_coefficients(const PressureLaw& law, FluxKind variant,
                                            double un_k, double un_nb, double q, double d) {
  if (!(un_k >= 0.0) || !(un_nb >= 0.0))
    throw std::invalid_argument("sg_ext_coefficients: negative state");
  const double drn = variant == FluxKind::sg_ext_midpoint ? dr_midpoint(law, un_k, un_nb)
                                                          : dr_log_mean(law, un_k, un_nb);
  return sg_coefficients_from_dr(drn, q, d);
}

inline EdgeCoefficients sg_classic_coefficients(double q, double d, double eps = 1.0) {
  const double x = d * q / eps;
  return {eps * bernoulli(-x), eps * bernoulli(x), 0.0};
}

// Flux value per tau_sigma plus its partial derivatives, for Newton assembly.
struct FluxLinearization {
  double value = 0.0;
  double d_k = 0.0;
  double d_nb = 0.0;
};

// Classical upwind: F/tau = r(U_K) - r(U_nb) + d (q^+ U_K - q^- U_nb).
inline FluxLinearization classical_upwind_residual(const PressureLaw& law, double u_k,
                                                   double u_nb, double q, double d) {
  if (!(u_k >= 0.0) || !(u_nb >= 0.0))
    throw std::invalid_argument("classical_upwind_residual: negative state");
  const double qp = q > 0.0 ? q : 0.0;
  const double qm = q < 0.0 ? -q : 0.0;
  FluxLinearization f;
  f.value = law.r(u_k) - law.r(u_nb) + d * (qp * u_k - qm * u_nb);
  f.d_k = law.r_prime(u_k) + d * qp;
  f.d_nb = -law.r_prime(u_nb) - d * qm;
  return f;
}

// Nonlinear upwind: F/tau = -min(U_K, U_nb) (h(U_nb) - h(U_K))
//                           + d (q^+ U_K - q^- U_nb),
// with the convention min * Dh = 0 when min = 0 (degenerate diffusion shuts
// off; also covers h(0) = -inf at gamma = 1). Ties in the min take the K side.
inline FluxLinearization nonlinear_upwind_residual(const PressureLaw& law, double u_k,
                                                   double u_nb, double q, double d) {
  if (!(u_k >= 0.0) || !(u_nb >= 0.0))
    throw std::invalid_argument("nonlinear_upwind_residual: negative state");
  const double qp = q > 0.0 ? q : 0.0;
  const double qm = q < 0.0 ? -q : 0.0;
  FluxLinearization f;
  f.value = d * (qp * u_k - qm * u_nb);
  f.d_k = d * qp;
  f.d_nb = -d * qm;
  const double mn = std::min(u_k, u_nb);
  if (mn > 0.0) {
    const double dh = law.enthalpy(u_nb) - law.enthalpy(u_k);
    f.value -= mn * dh;
    // note s h'(s) = r'(s)
    if (u_k <= u_nb) {  // min on the K side
      f.d_k += -dh + law.r_prime(u_k);
      f.d_nb += -mn * law.r_prime(u_nb) / u_nb;
    } else {
      f.d_k += mn * law.r_prime(u_k) / u_k;
      f.d_nb += -dh - law.r_prime(u_nb);
    }
  }
  return f;
}

// coth form of the SG-ext flux (algebraically identical to the Bernoulli
// form; used as a cross-check oracle):
//   F = m(sigma) q (U_K + U_nb)/2
//       - (m(sigma) q / 2) coth(d q / (2 dr)) (U_nb - U_K),
// where (m q / 2) coth(x) = tau dr x coth(x), with the series
// x coth(x) ~ 1 + x^2/3 near 0.
inline double coth_form_flux(double drn, double u_k, double u_nb, double q, double d,
                             double m_sigma) {
  if (!(drn > 0.0)) throw std::invalid_argument("coth_form_flux: needs dr > 0");
  const double x = d * q / (2.0 * drn);
  const double xcoth = std::abs(x) < 1e-4 ? 1.0 + x * x / 3.0 : x / std::tanh(x);
  const double tau = m_sigma / d;
  return m_sigma * q * (u_k + u_nb) / 2.0 - tau * drn * xcoth * (u_nb - u_k);
}

}  // namespace fvsg
