#pragma once

// BGPP metric profile functions, parameter handling and the multicentre
// representation of the same metric.
//
//   g = f^2 dt^2 + a^2 s1^2 + b^2 s2^2 + c^2 s3^2
//   A = sqrt(t - t1), B = sqrt(t - t2), C = sqrt(t - t3)
//   f^2 = 1/(4ABC), a^2 = BC/A, b^2 = CA/B, c^2 = AB/C
//
// Parameters are stored exactly as given (unsorted). Every formula in this
// library uses the literal indices; a sorted view is kept alongside for the
// parts that need an ordering (level-set classification, degeneracy).

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <string>

#include <Eigen/Dense>

#include "bgpp/errors.hpp"

namespace bgpp {

inline constexpr double kDefaultDegeneracyTol = 1e-12;
inline constexpr double kSingularSinTheta = 1e-10;

/// Coincidence pattern of the literal parameters (t1, t2, t3).
///
/// EH_II is the t1 = t2 coincidence, the complete Eguchi-Hanson limit when the
/// repeated value is the larger one. EH_I is t2 = t3. EqualOuter (t1 = t3 only)
/// cannot occur for ordered parameters and carries no special solution.
enum class Degeneracy { Generic, EH_I, EH_II, EqualOuter, Isotropic };

constexpr const char* to_string(Degeneracy d) {
  switch (d) {
    case Degeneracy::Generic: return "Generic";
    case Degeneracy::EH_I: return "EH_I";
    case Degeneracy::EH_II: return "EH_II";
    case Degeneracy::EqualOuter: return "EqualOuter";
    case Degeneracy::Isotropic: return "Isotropic";
  }
  return "Unknown";
}

struct MetricParams {
  std::array<double, 3> t{};       // literal (t1, t2, t3)
  std::array<double, 3> sorted{};  // ascending
  std::array<int, 3> order{};      // sorted[i] == t[order[i]]
  double t_max = 0.0;
  double t_min = 0.0;
  double tol = kDefaultDegeneracyTol;
  Degeneracy degeneracy = Degeneracy::Generic;

  double t1() const { return t[0]; }
  double t2() const { return t[1]; }
  double t3() const { return t[2]; }

  /// +1 if `order` is an even permutation, -1 otherwise.
  int order_parity() const {
    int inversions = 0;
    for (int i = 0; i < 3; ++i)
      for (int j = i + 1; j < 3; ++j)
        if (order[i] > order[j]) ++inversions;
    return inversions % 2 == 0 ? 1 : -1;
  }

  /// Absolute threshold under which two parameters are considered equal.
  double equality_threshold() const {
    return tol * std::max(1.0, std::max({std::abs(t[0]), std::abs(t[1]), std::abs(t[2])}));
  }

  bool nearly_equal(double x, double y) const { return std::abs(x - y) <= equality_threshold(); }
};

inline MetricParams validate_params(double t1, double t2, double t3,
                                    double tol = kDefaultDegeneracyTol) {
  if (!std::isfinite(t1) || !std::isfinite(t2) || !std::isfinite(t3))
    throw Error(ErrorKind::NonFinite, "metric parameters must be finite");
  if (!std::isfinite(tol) || tol < 0.0)
    throw Error(ErrorKind::NonFinite, "degeneracy tolerance must be finite and non-negative");
  if (t1 < 0.0 || t2 < 0.0 || t3 < 0.0)
    throw Error(ErrorKind::NegativeParameter, "metric parameters must be non-negative");

  MetricParams p;
  p.t = {t1, t2, t3};
  p.tol = tol;
  p.order = {0, 1, 2};
  std::stable_sort(p.order.begin(), p.order.end(), [&](int i, int j) { return p.t[i] < p.t[j]; });
  for (int i = 0; i < 3; ++i) p.sorted[i] = p.t[p.order[i]];
  p.t_min = p.sorted[0];
  p.t_max = p.sorted[2];

  const bool e12 = p.nearly_equal(t1, t2);
  const bool e23 = p.nearly_equal(t2, t3);
  const bool e13 = p.nearly_equal(t1, t3);
  if ((e12 && e23) || (e12 && e13) || (e23 && e13))
    p.degeneracy = Degeneracy::Isotropic;
  else if (e12)
    p.degeneracy = Degeneracy::EH_II;
  else if (e23)
    p.degeneracy = Degeneracy::EH_I;
  else if (e13)
    p.degeneracy = Degeneracy::EqualOuter;
  else
    p.degeneracy = Degeneracy::Generic;
  return p;
}

struct MetricProfile {
  double A = 0, B = 0, C = 0;
  double f2 = 0, a2 = 0, b2 = 0, c2 = 0;
};

inline void require_radial_domain(const MetricParams& p, double t) {
  if (!std::isfinite(t)) throw Error(ErrorKind::NonFinite, "radial coordinate t is not finite");
  if (!(t > p.t_max))
    throw Error(ErrorKind::DomainError,
                "t = " + std::to_string(t) + " must exceed t_max = " + std::to_string(p.t_max));
}

inline MetricProfile profile(const MetricParams& p, double t) {
  require_radial_domain(p, t);
  MetricProfile m;
  m.A = std::sqrt(t - p.t[0]);
  m.B = std::sqrt(t - p.t[1]);
  m.C = std::sqrt(t - p.t[2]);
  m.f2 = 1.0 / (4.0 * m.A * m.B * m.C);
  m.a2 = m.B * m.C / m.A;
  m.b2 = m.C * m.A / m.B;
  m.c2 = m.A * m.B / m.C;
  return m;
}

/// Inverse squared profiles 1/f^2, 1/a^2, 1/b^2, 1/c^2 and their t-derivatives.
struct InverseProfile {
  std::array<double, 4> value{};  // (1/f^2, 1/a^2, 1/b^2, 1/c^2)
  std::array<double, 4> slope{};  // d/dt of the above
};

inline InverseProfile inverse_profile(const MetricParams& p, double t) {
  const MetricProfile m = profile(p, t);
  const double ia = 1.0 / (t - p.t[0]);
  const double ib = 1.0 / (t - p.t[1]);
  const double ic = 1.0 / (t - p.t[2]);
  InverseProfile out;
  out.value = {4.0 * m.A * m.B * m.C, m.A / (m.B * m.C), m.B / (m.C * m.A), m.C / (m.A * m.B)};
  out.slope = {out.value[0] * 0.5 * (ia + ib + ic), out.value[1] * 0.5 * (ia - ib - ic),
               out.value[2] * 0.5 * (ib - ic - ia), out.value[3] * 0.5 * (ic - ia - ib)};
  return out;
}

inline void require_regular_angle(double theta) {
  if (std::abs(std::sin(theta)) < kSingularSinTheta)
    throw Error(ErrorKind::SingularPoint, "sin(theta) vanishes: Euler angles are singular");
}

/// BGPP metric components in the coordinate order (t, theta, phi, psi).
inline Eigen::Matrix4d metric_components(const MetricParams& p, double t, double theta, double psi) {
  const MetricProfile m = profile(p, t);
  const double st = std::sin(theta), ct = std::cos(theta);
  const double sp = std::sin(psi), cp = std::cos(psi);
  const Eigen::Vector4d s1(0.0, -sp, st * cp, 0.0);
  const Eigen::Vector4d s2(0.0, cp, st * sp, 0.0);
  const Eigen::Vector4d s3(0.0, 0.0, ct, 1.0);
  Eigen::Matrix4d g = m.a2 * s1 * s1.transpose() + m.b2 * s2 * s2.transpose() + m.c2 * s3 * s3.transpose();
  g(0, 0) += m.f2;
  return g;
}

/// Multicentre potential V and the one-form omega = omega_theta dtheta + omega_psi dpsi,
/// with sigma = phi as the fibre coordinate.
struct MulticentreData {
  double V = 0;
  double omega_theta = 0;
  double omega_psi = 0;
};

inline MulticentreData multicentre_data(const MetricParams& p, double t, double theta, double psi) {
  const MetricProfile m = profile(p, t);
  const double st = std::sin(theta), ct = std::cos(theta);
  const double sp = std::sin(psi), cp = std::cos(psi);
  MulticentreData d;
  d.V = 1.0 / (m.a2 * st * st * cp * cp + m.b2 * st * st * sp * sp + m.c2 * ct * ct);
  d.omega_theta = d.V * (m.b2 - m.a2) * st * sp * cp;
  d.omega_psi = d.V * m.c2 * ct;
  return d;
}

/// Flat coordinates x^i of the multicentre form.
inline Eigen::Vector3d multicentre_position(const MetricParams& p, double t, double theta, double psi) {
  const MetricProfile m = profile(p, t);
  return {m.A * std::sin(theta) * std::cos(psi), m.B * std::sin(theta) * std::sin(psi),
          m.C * std::cos(theta)};
}

/// Pullback of (1/V)(dphi + omega)^2 + V dx.dx to (t, theta, phi, psi), with
/// the Jacobian of x taken by central differences of step h.
inline Eigen::Matrix4d multicentre_pullback(const MetricParams& p, double t, double theta, double psi,
                                            double h) {
  const MulticentreData d = multicentre_data(p, t, theta, psi);
  Eigen::Matrix<double, 3, 4> jac = Eigen::Matrix<double, 3, 4>::Zero();
  jac.col(0) = (multicentre_position(p, t + h, theta, psi) - multicentre_position(p, t - h, theta, psi)) / (2 * h);
  jac.col(1) = (multicentre_position(p, t, theta + h, psi) - multicentre_position(p, t, theta - h, psi)) / (2 * h);
  jac.col(3) = (multicentre_position(p, t, theta, psi + h) - multicentre_position(p, t, theta, psi - h)) / (2 * h);
  const Eigen::Vector4d fibre(0.0, d.omega_theta, 1.0, d.omega_psi);
  return fibre * fibre.transpose() / d.V + d.V * jac.transpose() * jac;
}

/// Max abs deviation between the multicentre pullback and the BGPP components.
inline double multicentre_check(const MetricParams& p, double t, double theta, double psi, double h) {
  require_radial_domain(p, t);
  require_regular_angle(theta);
  if (!(h > 0.0) || !(t - h > p.t_max))
    throw Error(ErrorKind::DomainError, "finite-difference step must be positive and keep t - h > t_max");
  return (multicentre_pullback(p, t, theta, psi, h) - metric_components(p, t, theta, psi)).cwiseAbs().maxCoeff();
}

/// Eguchi-Hanson limit t1 = t2 > t3: gamma^2 = t1 - t3 and rho = sqrt(t - t3).
struct EHLimit {
  double gamma2 = 0;
  double t_distinct = 0;

  double rho(double t) const { return std::sqrt(t - t_distinct); }
  double t_of_rho(double rho) const { return t_distinct + rho * rho; }
};

inline EHLimit eh_limit(const MetricParams& p) {
  if (p.degeneracy != Degeneracy::EH_II || !(p.t[0] > p.t[2]))
    throw Error(ErrorKind::NotEHLimit,
                std::string("Eguchi-Hanson limit needs t1 = t2 > t3, got degeneracy ") + to_string(p.degeneracy));
  const double repeated = 0.5 * (p.t[0] + p.t[1]);
  return {repeated - p.t[2], p.t[2]};
}

}  // namespace bgpp
