#pragma once

// Closed five-dimensional subsystem X = (t, P_t, M1, M2, M3) with the
// block-diagonal Poisson tensor J2 (+) M^, its Casimir C = |M|^2, the separated
// radial equation (dt/dlambda)^2 = S(t) and the tau(t) quadrature.

#include <array>
#include <cmath>
#include <string>

#include <Eigen/Dense>

#include "bgpp/errors.hpp"
#include "bgpp/full_flow.hpp"
#include "bgpp/metric.hpp"
#include "bgpp/special_functions.hpp"

namespace bgpp {

using Vector5 = Eigen::Matrix<double, 5, 1>;
using Matrix5 = Eigen::Matrix<double, 5, 5>;

struct ReducedState {
  double t = 0, P_t = 0, M1 = 0, M2 = 0, M3 = 0;

  static constexpr std::size_t dimension = 5;

  Vector5 vector() const { return (Vector5() << t, P_t, M1, M2, M3).finished(); }
  std::array<double, 5> array() const { return {t, P_t, M1, M2, M3}; }
  static ReducedState from(const Vector5& x) { return {x[0], x[1], x[2], x[3], x[4]}; }
  static ReducedState from(const std::array<double, 5>& x) { return {x[0], x[1], x[2], x[3], x[4]}; }
  static ReducedState from(const MixedState& s) { return {s.t, s.P_t, s.M1, s.M2, s.M3}; }
};

/// Values of the first integrals: e = H, m2 = C, n2 = I.
struct LevelSet {
  double e = 0;
  double m2 = 0;
  double n2 = 0;
};

inline double reduced_hamiltonian(const ReducedState& s, const MetricParams& p) {
  const MetricProfile m = profile(p, s.t);
  return 0.5 * (s.P_t * s.P_t / m.f2 + s.M1 * s.M1 / m.a2 + s.M2 * s.M2 / m.b2 + s.M3 * s.M3 / m.c2);
}

inline double casimir(const ReducedState& s) { return s.M1 * s.M1 + s.M2 * s.M2 + s.M3 * s.M3; }

inline double second_integral(const ReducedState& s, const MetricParams& p) {
  return p.t[0] * s.M1 * s.M1 + p.t[1] * s.M2 * s.M2 + p.t[2] * s.M3 * s.M3;
}

inline ReducedState rhs_reduced(const ReducedState& s, const MetricParams& p) {
  const MetricProfile m = profile(p, s.t);
  const InverseProfile ip = inverse_profile(p, s.t);
  const double four_f2 = 4.0 * m.f2;
  ReducedState d;
  d.t = s.P_t / m.f2;
  d.P_t = -0.5 * (ip.slope[0] * s.P_t * s.P_t + ip.slope[1] * s.M1 * s.M1 + ip.slope[2] * s.M2 * s.M2 +
                  ip.slope[3] * s.M3 * s.M3);
  d.M1 = four_f2 * (p.t[2] - p.t[1]) * s.M2 * s.M3;
  d.M2 = four_f2 * (p.t[0] - p.t[2]) * s.M3 * s.M1;
  d.M3 = four_f2 * (p.t[1] - p.t[0]) * s.M1 * s.M2;
  return d;
}

inline Matrix5 poisson_tensor_reduced(const ReducedState& s) {
  Matrix5 P = Matrix5::Zero();
  P(0, 1) = 1.0;
  P(1, 0) = -1.0;
  P.block<3, 3>(2, 2) = hat(s.M1, s.M2, s.M3);
  return P;
}

/// Jacobi identity residual of the reduced tensor; its derivatives are constant.
inline double jacobi_residual_reduced(const ReducedState& s) {
  const Matrix5 P = poisson_tensor_reduced(s);
  std::array<Matrix5, 5> dP;
  for (int l = 0; l < 5; ++l) {
    dP[l] = Matrix5::Zero();
    if (l >= 2) {
      double e[3] = {0.0, 0.0, 0.0};
      e[l - 2] = 1.0;
      dP[l].block<3, 3>(2, 2) = hat(e[0], e[1], e[2]);
    }
  }
  double worst = 0.0;
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j < 5; ++j)
      for (int k = 0; k < 5; ++k) {
        double sum = 0.0;
        for (int l = 0; l < 5; ++l)
          sum += P(i, l) * dP[l](j, k) + P(j, l) * dP[l](k, i) + P(k, l) * dP[l](i, j);
        worst = std::max(worst, std::abs(sum));
      }
  return worst;
}

inline Vector5 reduced_hamiltonian_gradient(const ReducedState& s, const MetricParams& p) {
  const InverseProfile ip = inverse_profile(p, s.t);
  Vector5 g;
  g << 0.5 * (ip.slope[0] * s.P_t * s.P_t + ip.slope[1] * s.M1 * s.M1 + ip.slope[2] * s.M2 * s.M2 +
              ip.slope[3] * s.M3 * s.M3),
      ip.value[0] * s.P_t, ip.value[1] * s.M1, ip.value[2] * s.M2, ip.value[3] * s.M3;
  return g;
}

inline Vector5 casimir_gradient(const ReducedState& s) {
  return (Vector5() << 0.0, 0.0, 2 * s.M1, 2 * s.M2, 2 * s.M3).finished();
}

inline Vector5 second_integral_gradient(const ReducedState& s, const MetricParams& p) {
  return (Vector5() << 0.0, 0.0, 2 * p.t[0] * s.M1, 2 * p.t[1] * s.M2, 2 * p.t[2] * s.M3).finished();
}

inline double bracket(const Vector5& grad_f, const Vector5& grad_g, const ReducedState& s) {
  return grad_f.dot(poisson_tensor_reduced(s) * grad_g);
}

inline LevelSet levels_from_state(const ReducedState& s, const MetricParams& p) {
  return {reduced_hamiltonian(s, p), casimir(s), second_integral(s, p)};
}

/// (t - t1)(t - t2)(t - t3); non-negative for t >= t_max.
inline double parameter_cubic(const MetricParams& p, double t) {
  return (t - p.t[0]) * (t - p.t[1]) * (t - p.t[2]);
}

/// S(t) = 4 (n^2 - m^2 t + 2 e sqrt((t - t1)(t - t2)(t - t3))).
inline double s_polynomial(const LevelSet& lv, const MetricParams& p, double t) {
  if (!std::isfinite(t)) throw Error(ErrorKind::NonFinite, "s_polynomial: t not finite");
  if (t < p.t_max) throw Error(ErrorKind::DomainError, "s_polynomial needs t >= t_max");
  return 4.0 * (lv.n2 - lv.m2 * t + 2.0 * lv.e * std::sqrt(std::max(0.0, parameter_cubic(p, t))));
}

/// Magnitude of the terms summed in S(t); used to judge round-off.
inline double s_polynomial_scale(const LevelSet& lv, const MetricParams& p, double t) {
  return 4.0 * (std::abs(lv.n2) + std::abs(lv.m2 * t) +
                2.0 * std::abs(lv.e) * std::sqrt(std::max(0.0, parameter_cubic(p, t))));
}

namespace detail {

/// P and S at t = base + u, expanded in u so that points close to base keep
/// full relative accuracy (no rounding of base + u).
struct ShiftedRadial {
  const LevelSet& lv;
  std::array<double, 3> d;  // base - t_i
  double p0;                // P(base)
  double s0;                // S(base), clamped at zero
  double sqrt_p0;

  ShiftedRadial(const LevelSet& levels, const MetricParams& p, double base)
      : lv(levels), d{base - p.t[0], base - p.t[1], base - p.t[2]} {
    p0 = std::max(0.0, d[0] * d[1] * d[2]);
    sqrt_p0 = std::sqrt(p0);
    s0 = std::max(0.0, 4.0 * (lv.n2 - lv.m2 * base + 2.0 * lv.e * sqrt_p0));
  }

  double cubic(double u) const { return std::max(0.0, (d[0] + u) * (d[1] + u) * (d[2] + u)); }

  double s(double u, double cubic_value) const {
    if (u == 0.0) return s0;
    const double e1 = d[0] + d[1] + d[2];
    const double e2 = d[0] * d[1] + d[0] * d[2] + d[1] * d[2];
    const double dp = u * (e2 + u * (e1 + u));  // P(base + u) - P(base)
    const double dsqrt = dp / (std::sqrt(cubic_value) + sqrt_p0);
    return s0 + 4.0 * (-lv.m2 * u + 2.0 * lv.e * dsqrt);
  }

  double integrand(double u) const {
    const double pc = cubic(u);
    return 1.0 / std::sqrt(pc * std::abs(s(u, pc)));
  }
};

}  // namespace detail

/// tau(t) - tau(t0) = int_{t0}^{t} du / sqrt(P(u) S(u)) on a branch with S > 0.
/// Both ends are desingularized, so either may be a simple root of S or t_max.
inline QuadResult tau_of_t_detailed(const LevelSet& lv, const MetricParams& p, double t0, double t,
                                    const QuadOptions& opt = {1e-13, 1e-13, 4000}) {
  if (!std::isfinite(t0) || !std::isfinite(t)) throw Error(ErrorKind::NonFinite, "tau_of_t: non-finite bound");
  if (t0 < p.t_max || t < p.t_max) throw Error(ErrorKind::DomainError, "tau_of_t needs t0, t >= t_max");
  if (t0 == t) return {0.0, 0.0};

  const double lo = std::min(t0, t), hi = std::max(t0, t);
  constexpr int probes = 64;
  for (int i = 1; i < probes; ++i) {
    const double u = lo + (hi - lo) * i / probes;
    if (s_polynomial(lv, p, u) < -1e-12 * s_polynomial_scale(lv, p, u))
      throw Error(ErrorKind::TurningPointCrossed,
                  "S(t) < 0 at t = " + std::to_string(u) + " between the quadrature limits");
  }
  // Substitutions t = lo + s^2 and t = hi - s^2 on the two halves.
  const double half = std::sqrt(0.5 * (hi - lo));
  const detail::ShiftedRadial left(lv, p, lo), right(lv, p, hi);
  const QuadResult a = adaptive_quad([&](double s) { return 2.0 * s * left.integrand(s * s); }, 0.0, half, opt);
  const QuadResult b = adaptive_quad([&](double s) { return 2.0 * s * right.integrand(-s * s); }, 0.0, half, opt);
  QuadResult r{a.value + b.value, a.error + b.error};
  if (t < t0) r.value = -r.value;
  return r;
}

inline double tau_of_t(const LevelSet& lv, const MetricParams& p, double t0, double t) {
  return tau_of_t_detailed(lv, p, t0, t).value;
}

/// Quadrature with the lower limit at t_max; only real when S(t_max) >= 0.
inline double tau_from_t_max(const LevelSet& lv, const MetricParams& p, double t) {
  if (s_polynomial(lv, p, p.t_max) < -1e-12 * s_polynomial_scale(lv, p, p.t_max))
    throw Error(ErrorKind::DomainError, "S(t_max) < 0: t_max is outside the allowed region of this level set");
  return tau_of_t(lv, p, p.t_max, t);
}

/// Root of S reached from a point `t_inside` with S >= 0 by moving down
/// (direction < 0) or up (direction > 0). Bisection to full precision.
inline double radial_turning_point(const LevelSet& lv, const MetricParams& p, double t_inside, int direction) {
  if (s_polynomial(lv, p, t_inside) < 0.0) {
    // Already past the root by round-off; treat the sample itself as the turning point.
    return t_inside;
  }
  double inside = t_inside, outside = t_inside;
  double step = std::max(1e-12, 1e-6 * std::abs(t_inside - p.t_max));
  bool bracketed = false;
  for (int i = 0; i < 200; ++i) {
    outside = direction < 0 ? std::max(p.t_max, inside - step) : inside + step;
    if (s_polynomial(lv, p, outside) < 0.0) {
      bracketed = true;
      break;
    }
    if (direction < 0 && outside == p.t_max) break;
    inside = outside;
    step *= 2.0;
  }
  if (!bracketed) {
    if (direction < 0) return p.t_max;
    throw Error(ErrorKind::NoConvergence, "no upper turning point found for S(t)");
  }
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (inside + outside);
    if (mid == inside || mid == outside) break;
    (s_polynomial(lv, p, mid) >= 0.0 ? inside : outside) = mid;
  }
  return inside;
}

}  // namespace bgpp
