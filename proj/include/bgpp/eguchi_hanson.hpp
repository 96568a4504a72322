#pragma once

// Eguchi-Hanson limit t1 = t2 > t3 in the radial variable rho = sqrt(t - t3),
// gamma^2 = t1 - t3:
//
//   H = 1/2 ((rho^2 - gamma^2)/rho P_rho^2 + (M1^2 + M2^2)/rho + rho/(rho^2 - gamma^2) M3^2)
//   (drho/dlambda)^2 = R(rho)/rho^2,  R = 2e rho^3 - (mu^2 + m3^2) rho^2 - 2e gamma^2 rho + gamma^2 mu^2
//   dtau/dlambda = 1/(rho (rho^2 - gamma^2))

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <string>

#include "bgpp/errors.hpp"
#include "bgpp/metric.hpp"
#include "bgpp/reduced_flow.hpp"
#include "bgpp/special_functions.hpp"

namespace bgpp {

struct EHState {
  double rho = 0, P_rho = 0, M1 = 0, M2 = 0, M3 = 0;

  static constexpr std::size_t dimension = 5;

  std::array<double, 5> array() const { return {rho, P_rho, M1, M2, M3}; }
  static EHState from(const std::array<double, 5>& x) { return {x[0], x[1], x[2], x[3], x[4]}; }
};

struct EHLevels {
  double e = 0;
  double m3 = 0;
  double mu2 = 0;
  double gamma2 = 0;
  std::array<double, 3> roots{};  // filled by with_roots()
  bool has_roots = false;

  double gamma() const { return std::sqrt(gamma2); }
};

inline void require_gamma2(double gamma2) {
  if (!std::isfinite(gamma2)) throw Error(ErrorKind::NonFinite, "gamma^2 not finite");
  if (!(gamma2 > 0.0)) throw Error(ErrorKind::NegativeParameter, "gamma^2 must be positive");
}

inline EHLevels make_eh_levels(double e, double m3, double mu2, double gamma2) {
  require_gamma2(gamma2);
  if (!std::isfinite(e) || !std::isfinite(m3) || !std::isfinite(mu2))
    throw Error(ErrorKind::NonFinite, "EH levels must be finite");
  if (mu2 < 0.0) throw Error(ErrorKind::NegativeParameter, "mu^2 must be non-negative");
  EHLevels lv;
  lv.e = e;
  lv.m3 = m3;
  lv.mu2 = mu2;
  lv.gamma2 = gamma2;
  return lv;
}

inline void require_eh_domain(double rho, double gamma2) {
  if (!std::isfinite(rho)) throw Error(ErrorKind::NonFinite, "rho not finite");
  if (!(rho * rho > gamma2))
    throw Error(ErrorKind::DomainError, "rho = " + std::to_string(rho) + " must exceed gamma");
}

inline double eh_hamiltonian(const EHState& s, double gamma2) {
  require_gamma2(gamma2);
  require_eh_domain(s.rho, gamma2);
  const double d = s.rho * s.rho - gamma2;
  return 0.5 * (d / s.rho * s.P_rho * s.P_rho + (s.M1 * s.M1 + s.M2 * s.M2) / s.rho + s.rho / d * s.M3 * s.M3);
}

inline EHState eh_rhs(const EHState& s, double gamma2) {
  require_gamma2(gamma2);
  require_eh_domain(s.rho, gamma2);
  const double r2 = s.rho * s.rho;
  const double d = r2 - gamma2;
  const double mu2 = s.M1 * s.M1 + s.M2 * s.M2;
  const double w = gamma2 / (s.rho * d);
  EHState out;
  out.rho = d * s.P_rho / s.rho;
  out.P_rho = 0.5 * (-s.P_rho * s.P_rho * (r2 + gamma2) / r2 + mu2 / r2 + s.M3 * s.M3 * (r2 + gamma2) / (d * d));
  out.M1 = -w * s.M2 * s.M3;
  out.M2 = w * s.M3 * s.M1;
  out.M3 = 0.0;
  return out;
}

inline EHLevels eh_levels_from_state(const EHState& s, double gamma2) {
  return make_eh_levels(eh_hamiltonian(s, gamma2), s.M3, s.M1 * s.M1 + s.M2 * s.M2, gamma2);
}

/// Coefficients of R, highest degree first.
inline std::array<double, 4> r_cubic_coefficients(const EHLevels& lv) {
  return {2.0 * lv.e, -(lv.mu2 + lv.m3 * lv.m3), -2.0 * lv.e * lv.gamma2, lv.gamma2 * lv.mu2};
}

inline double r_cubic(const EHLevels& lv, double rho) {
  const auto c = r_cubic_coefficients(lv);
  return ((c[0] * rho + c[1]) * rho + c[2]) * rho + c[3];
}

inline double r_cubic_derivative(const EHLevels& lv, double rho) {
  const auto c = r_cubic_coefficients(lv);
  return (3.0 * c[0] * rho + 2.0 * c[1]) * rho + c[2];
}

/// Closed-form discriminant of R.
inline double eh_discriminant(const EHLevels& lv) {
  const double g2 = lv.gamma2, e2 = lv.e * lv.e, mu2 = lv.mu2, mu4 = mu2 * mu2, m32 = lv.m3 * lv.m3;
  const double lead = mu4 - 4.0 * g2 * e2;
  return 4.0 * g2 *
         (lead * lead + m32 * (g2 * e2 * (20.0 * mu2 + m32) + mu2 * (3.0 * mu4 + m32 * m32 + 3.0 * mu2 * m32)));
}

/// Size of the discriminant's terms, for deciding when it is zero.
inline double eh_discriminant_scale(const EHLevels& lv) {
  const double g2 = lv.gamma2, e2 = lv.e * lv.e, mu2 = lv.mu2, mu4 = mu2 * mu2, m32 = lv.m3 * lv.m3;
  const double lead = mu4 + 4.0 * g2 * e2;
  return 4.0 * g2 *
         (lead * lead + m32 * (g2 * e2 * (20.0 * mu2 + m32) + mu2 * (3.0 * mu4 + m32 * m32 + 3.0 * mu2 * m32)));
}

inline constexpr double kDiscriminantTol = 1e-12;

/// Ascending real roots of R: trigonometric solution of the depressed cubic,
/// then two Newton steps on R itself.
inline std::array<double, 3> eh_roots(const EHLevels& lv) {
  require_gamma2(lv.gamma2);
  if (!(lv.e > 0.0)) throw Error(ErrorKind::DomainError, "EH roots need e > 0");
  if (eh_discriminant(lv) <= kDiscriminantTol * eh_discriminant_scale(lv))
    throw Error(ErrorKind::DegenerateRoots, "R(rho) has a repeated root (m3 = 0, mu^2 = 2 e gamma)");

  const auto c = r_cubic_coefficients(lv);
  const double b = c[1] / c[0], cc = c[2] / c[0], d = c[3] / c[0];
  const double p = cc - b * b / 3.0;
  const double q = 2.0 * b * b * b / 27.0 - b * cc / 3.0 + d;
  std::array<double, 3> roots{};
  if (p >= 0.0) throw Error(ErrorKind::DegenerateRoots, "R(rho) does not have three distinct real roots");
  const double r = 2.0 * std::sqrt(-p / 3.0);
  const double arg = std::clamp(3.0 * q / (2.0 * p) * std::sqrt(-3.0 / p), -1.0, 1.0);
  const double theta = std::acos(arg) / 3.0;
  for (int k = 0; k < 3; ++k) roots[k] = r * std::cos(theta - 2.0 * std::numbers::pi * k / 3.0) - b / 3.0;
  std::sort(roots.begin(), roots.end());

  for (double& x : roots)
    for (int it = 0; it < 2; ++it) {
      const double slope = r_cubic_derivative(lv, x);
      if (slope != 0.0) x -= r_cubic(lv, x) / slope;
    }
  std::sort(roots.begin(), roots.end());
  return roots;
}

inline EHLevels with_roots(EHLevels lv) {
  lv.roots = eh_roots(lv);
  lv.has_roots = true;
  return lv;
}

/// Rotation of (M1, M2) at angular rate gamma^2 m3 in tau.
inline std::array<double, 2> eh_m12_solution(const EHLevels& lv, double tau, double phi0) {
  const double mu = std::sqrt(lv.mu2);
  const double arg = lv.gamma2 * lv.m3 * tau + phi0;
  return {mu * std::sin(arg), -mu * std::cos(arg)};
}

/// Phase phi0 placing (M1, M2) on the solution at tau = 0.
inline double eh_phase(double M1, double M2) { return std::atan2(M1, -M2); }

/// Closed form of tau(rho) for rho >= rho3, normalized so tau -> 0 as rho -> infinity.
inline double eh_tau_closed(const EHLevels& lv, double rho) {
  require_gamma2(lv.gamma2);
  const double g = lv.gamma();
  if (lv.m3 == 0.0) {
    if (std::abs(lv.mu2 - 2.0 * lv.e * g) <= 1e-12 * std::max(1.0, lv.mu2))
      throw Error(ErrorKind::DegenerateRoots, "degenerate level set: use the logarithmic form");
    throw Error(ErrorKind::BoundaryBolt, "m3 = 0 puts a root of R on the bolt rho = gamma");
  }
  const std::array<double, 3> r = lv.has_roots ? lv.roots : eh_roots(lv);
  if (!std::isfinite(rho)) throw Error(ErrorKind::NonFinite, "rho not finite");
  if (rho < r[2]) throw Error(ErrorKind::DomainError, "rho below the turning point rho3");

  const double r31 = r[2] - r[0];
  const double sigma = std::asin(std::sqrt(std::min(1.0, r31 / (rho - r[0]))));
  const double k2 = (r[1] - r[0]) / r31;
  const double n_minus = (r[0] - g) / (r[0] - r[2]);
  const double n_plus = (r[0] + g) / (r[0] - r[2]);
  const double bracket = 2.0 * g * elliptic_F(sigma, k2) - (g + r[0]) * elliptic_Pi(sigma, n_minus, k2) -
                         (g - r[0]) * elliptic_Pi(sigma, n_plus, k2);
  return bracket / (g * std::sqrt(2.0 * lv.e) * std::sqrt(r31) * (lv.gamma2 - r[0] * r[0]));
}

inline bool is_degenerate_level(const EHLevels& lv, double tol = 1e-9) {
  return std::abs(lv.m3) <= tol * std::max(1.0, std::sqrt(lv.mu2)) &&
         std::abs(lv.mu2 - 2.0 * lv.e * lv.gamma()) <= tol * std::max(1.0, lv.mu2);
}

/// tau(rho) on the double-root level m3 = 0, mu^2 = 2 e gamma, for rho > gamma.
inline double eh_tau_degenerate(const EHLevels& lv, double rho, double tol = 1e-9) {
  require_gamma2(lv.gamma2);
  if (!(lv.e > 0.0) || !is_degenerate_level(lv, tol))
    throw Error(ErrorKind::NotDegenerate, "logarithmic form needs m3 = 0 and mu^2 = 2 e gamma");
  const double g = lv.gamma();
  require_eh_domain(rho, lv.gamma2);
  const double sp = std::sqrt(rho + g), s2g = std::sqrt(2.0 * g);
  const double algebraic = (g - 3.0 * rho) / ((rho - g) * sp);
  const double logarithmic = 3.0 / (2.0 * s2g) * std::log((sp + s2g) / (sp - s2g));
  return (algebraic + logarithmic) / (4.0 * std::sqrt(2.0 * lv.e) * lv.gamma2);
}

/// Direct quadrature of dtau = drho / ((rho^2 - gamma^2) sqrt(R)), both ends desingularized.
inline QuadResult eh_tau_quadrature(const EHLevels& lv, double rho_a, double rho_b,
                                    const QuadOptions& opt = {1e-14, 1e-13, 4000}) {
  require_eh_domain(std::min(rho_a, rho_b), lv.gamma2);
  const auto integrand = [&](double x) {
    return 1.0 / ((x * x - lv.gamma2) * std::sqrt(std::abs(r_cubic(lv, x))));
  };
  const double lo = std::min(rho_a, rho_b), hi = std::max(rho_a, rho_b);
  for (int i = 1; i < 64; ++i) {
    const double x = lo + (hi - lo) * i / 64.0;
    if (r_cubic(lv, x) < 0.0) throw Error(ErrorKind::TurningPointCrossed, "R(rho) < 0 inside the interval");
  }
  QuadResult q = quad_sqrt_both_ends(integrand, lo, hi, opt);
  if (rho_b < rho_a) q.value = -q.value;
  return q;
}

/// Generic reduced state with t1 = t2 mapped to EH variables: rho = sqrt(t - t3), P_rho = 2 rho P_t.
inline EHState eh_from_reduced(const ReducedState& s, const EHLimit& lim) {
  const double rho = lim.rho(s.t);
  return {rho, 2.0 * rho * s.P_t, s.M1, s.M2, s.M3};
}

inline ReducedState reduced_from_eh(const EHState& s, const EHLimit& lim) {
  return {lim.t_of_rho(s.rho), s.P_rho / (2.0 * s.rho), s.M1, s.M2, s.M3};
}

/// Chain-rule image of a reduced velocity at `s` in EH variables.
inline EHState eh_velocity_from_reduced(const ReducedState& s, const ReducedState& ds, const EHLimit& lim) {
  const double rho = lim.rho(s.t);
  const double rho_dot = ds.t / (2.0 * rho);
  return {rho_dot, 2.0 * rho_dot * s.P_t + 2.0 * rho * ds.P_t, ds.M1, ds.M2, ds.M3};
}

}  // namespace bgpp
