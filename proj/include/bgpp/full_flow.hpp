#pragma once

// Geodesic flow of the BGPP metric in the non-canonical variables
// (t, P_t, M1, M2, M3, phi, theta, psi) with
//   H = 1/2 (P_t^2/f^2 + M1^2/a^2 + M2^2/b^2 + M3^2/c^2)
// and the 8x8 Poisson tensor
//   J = [ J2 0  0  ]
//       [ 0  M^ -K^T ]
//       [ 0  K  0  ].

#include <array>
#include <cmath>
#include <functional>

#include <Eigen/Dense>

#include "bgpp/errors.hpp"
#include "bgpp/metric.hpp"

namespace bgpp {

using Vector8 = Eigen::Matrix<double, 8, 1>;
using Matrix8 = Eigen::Matrix<double, 8, 8>;

struct CanonicalState {
  double t = 0, theta = 0, phi = 0, psi = 0;
  double P_t = 0, P_theta = 0, P_phi = 0, P_psi = 0;
};

/// Ordering (t, P_t, M1, M2, M3, phi, theta, psi) matches the tensor layout.
struct MixedState {
  double t = 0, P_t = 0, M1 = 0, M2 = 0, M3 = 0, phi = 0, theta = 0, psi = 0;

  static constexpr std::size_t dimension = 8;

  Vector8 vector() const { return (Vector8() << t, P_t, M1, M2, M3, phi, theta, psi).finished(); }
  std::array<double, 8> array() const { return {t, P_t, M1, M2, M3, phi, theta, psi}; }

  static MixedState from(const Vector8& x) { return {x[0], x[1], x[2], x[3], x[4], x[5], x[6], x[7]}; }
  static MixedState from(const std::array<double, 8>& x) {
    return {x[0], x[1], x[2], x[3], x[4], x[5], x[6], x[7]};
  }
};

struct IntegralValues {
  double H = 0;
  double P_phi = 0;
  double C = 0;
  double I = 0;
};

inline MixedState to_mixed(const CanonicalState& s) {
  require_regular_angle(s.theta);
  const double st = std::sin(s.theta), ct = std::cos(s.theta);
  const double sp = std::sin(s.psi), cp = std::cos(s.psi);
  const double q = (s.P_phi - ct * s.P_psi) / st;
  MixedState m;
  m.t = s.t;
  m.P_t = s.P_t;
  m.M1 = -sp * s.P_theta + cp * q;
  m.M2 = cp * s.P_theta + sp * q;
  m.M3 = s.P_psi;
  m.phi = s.phi;
  m.theta = s.theta;
  m.psi = s.psi;
  return m;
}

inline CanonicalState from_mixed(const MixedState& m) {
  require_regular_angle(m.theta);
  const double st = std::sin(m.theta), ct = std::cos(m.theta);
  const double sp = std::sin(m.psi), cp = std::cos(m.psi);
  CanonicalState s;
  s.t = m.t;
  s.theta = m.theta;
  s.phi = m.phi;
  s.psi = m.psi;
  s.P_t = m.P_t;
  s.P_theta = -sp * m.M1 + cp * m.M2;
  s.P_phi = st * (cp * m.M1 + sp * m.M2) + ct * m.M3;
  s.P_psi = m.M3;
  return s;
}

inline double hamiltonian(const MixedState& s, const MetricParams& p) {
  const MetricProfile m = profile(p, s.t);
  return 0.5 * (s.P_t * s.P_t / m.f2 + s.M1 * s.M1 / m.a2 + s.M2 * s.M2 / m.b2 + s.M3 * s.M3 / m.c2);
}

/// The Hamiltonian written directly in canonical momenta.
inline double canonical_hamiltonian(const CanonicalState& s, const MetricParams& p) {
  require_regular_angle(s.theta);
  const MetricProfile m = profile(p, s.t);
  const double csc = 1.0 / std::sin(s.theta);
  const double cot = std::cos(s.theta) / std::sin(s.theta);
  const double sp = std::sin(s.psi), cp = std::cos(s.psi);
  const double u1 = csc * cp * (s.P_phi - s.P_psi * std::cos(s.theta)) - s.P_theta * sp;
  const double u2 = s.P_theta * cp + sp * (s.P_phi * csc - s.P_psi * cot);
  return u1 * u1 / (2 * m.a2) + u2 * u2 / (2 * m.b2) + s.P_psi * s.P_psi / (2 * m.c2) +
         s.P_t * s.P_t / (2 * m.f2);
}

/// The K block: rows (phi, theta, psi), columns (M1, M2, M3).
template <class T>
Eigen::Matrix<T, 3, 3> angular_block_t(T theta, T psi) {
  require_regular_angle(static_cast<double>(theta));
  using std::cos, std::sin;
  const T csc = T(1) / sin(theta);
  const T cot = cos(theta) / sin(theta);
  const T sp = sin(psi), cp = cos(psi);
  Eigen::Matrix<T, 3, 3> K;
  K << csc * cp, csc * sp, T(0),
       -sp, cp, T(0),
       -cot * cp, -cot * sp, T(1);
  return K;
}

template <class T>
Eigen::Matrix<T, 3, 3> hat_t(T M1, T M2, T M3) {
  Eigen::Matrix<T, 3, 3> h;
  h << T(0), M3, -M2,
       -M3, T(0), M1,
       M2, -M1, T(0);
  return h;
}

/// Tensor at a point given in (t, P_t, M1, M2, M3, phi, theta, psi) order.
template <class T>
Eigen::Matrix<T, 8, 8> poisson_tensor_t(const Eigen::Matrix<T, 8, 1>& x) {
  const Eigen::Matrix<T, 3, 3> K = angular_block_t<T>(x[6], x[7]);
  Eigen::Matrix<T, 8, 8> J = Eigen::Matrix<T, 8, 8>::Zero();
  J(0, 1) = T(1);
  J(1, 0) = T(-1);
  J.template block<3, 3>(2, 2) = hat_t<T>(x[2], x[3], x[4]);
  J.template block<3, 3>(2, 5) = -K.transpose();
  J.template block<3, 3>(5, 2) = K;
  return J;
}

inline Eigen::Matrix3d angular_block(double theta, double psi) { return angular_block_t<double>(theta, psi); }

inline Eigen::Matrix3d hat(double M1, double M2, double M3) { return hat_t<double>(M1, M2, M3); }

inline Matrix8 poisson_tensor(const MixedState& s) { return poisson_tensor_t<double>(s.vector()); }

inline Vector8 hamiltonian_gradient(const MixedState& s, const MetricParams& p) {
  const InverseProfile ip = inverse_profile(p, s.t);
  Vector8 g = Vector8::Zero();
  g[0] = 0.5 * (ip.slope[0] * s.P_t * s.P_t + ip.slope[1] * s.M1 * s.M1 + ip.slope[2] * s.M2 * s.M2 +
                ip.slope[3] * s.M3 * s.M3);
  g[1] = ip.value[0] * s.P_t;
  g[2] = ip.value[1] * s.M1;
  g[3] = ip.value[2] * s.M2;
  g[4] = ip.value[3] * s.M3;
  return g;
}

inline Vector8 p_phi_gradient(const MixedState& s) {
  const double st = std::sin(s.theta), ct = std::cos(s.theta);
  const double sp = std::sin(s.psi), cp = std::cos(s.psi);
  Vector8 g = Vector8::Zero();
  g[2] = st * cp;
  g[3] = st * sp;
  g[4] = ct;
  g[6] = ct * (s.M1 * cp + s.M2 * sp) - st * s.M3;
  g[7] = st * (-s.M1 * sp + s.M2 * cp);
  return g;
}

inline Vector8 casimir_gradient(const MixedState& s) {
  Vector8 g = Vector8::Zero();
  g[2] = 2 * s.M1;
  g[3] = 2 * s.M2;
  g[4] = 2 * s.M3;
  return g;
}

inline Vector8 second_integral_gradient(const MixedState& s, const MetricParams& p) {
  Vector8 g = Vector8::Zero();
  g[2] = 2 * p.t[0] * s.M1;
  g[3] = 2 * p.t[1] * s.M2;
  g[4] = 2 * p.t[2] * s.M3;
  return g;
}

/// Hand-coded Hamilton equations.
inline MixedState rhs_full(const MixedState& s, const MetricParams& p) {
  const MetricProfile m = profile(p, s.t);
  const InverseProfile ip = inverse_profile(p, s.t);
  require_regular_angle(s.theta);
  const double abc = m.A * m.B * m.C;
  const double csc = 1.0 / std::sin(s.theta);
  const double cot = std::cos(s.theta) * csc;
  const double sp = std::sin(s.psi), cp = std::cos(s.psi);
  const double w1 = s.M1 / m.a2, w2 = s.M2 / m.b2, w3 = s.M3 / m.c2;

  MixedState d;
  d.t = s.P_t / m.f2;
  d.P_t = -0.5 * (ip.slope[0] * s.P_t * s.P_t + ip.slope[1] * s.M1 * s.M1 + ip.slope[2] * s.M2 * s.M2 +
                  ip.slope[3] * s.M3 * s.M3);
  d.M1 = (p.t[2] - p.t[1]) / abc * s.M2 * s.M3;
  d.M2 = (p.t[0] - p.t[2]) / abc * s.M3 * s.M1;
  d.M3 = (p.t[1] - p.t[0]) / abc * s.M1 * s.M2;
  d.phi = csc * (w1 * cp + w2 * sp);
  d.theta = w2 * cp - w1 * sp;
  d.psi = -cot * (w1 * cp + w2 * sp) + w3;
  return d;
}

inline IntegralValues integrals(const MixedState& s, const MetricParams& p) {
  IntegralValues v;
  v.H = hamiltonian(s, p);
  v.P_phi = std::sin(s.theta) * (s.M1 * std::cos(s.psi) + s.M2 * std::sin(s.psi)) + s.M3 * std::cos(s.theta);
  v.C = s.M1 * s.M1 + s.M2 * s.M2 + s.M3 * s.M3;
  v.I = p.t[0] * s.M1 * s.M1 + p.t[1] * s.M2 * s.M2 + p.t[2] * s.M3 * s.M3;
  return v;
}

using ScalarField = std::function<double(const MixedState&)>;

/// Central-difference gradient with step h_rel * max(1, |x_i|).
inline Vector8 numeric_gradient(const ScalarField& f, const MixedState& s, double h_rel = 1e-6) {
  const Vector8 x = s.vector();
  Vector8 g;
  for (int i = 0; i < 8; ++i) {
    const double h = h_rel * std::max(1.0, std::abs(x[i]));
    Vector8 xp = x, xm = x;
    xp[i] += h;
    xm[i] -= h;
    g[i] = (f(MixedState::from(xp)) - f(MixedState::from(xm))) / (xp[i] - xm[i]);
  }
  return g;
}

/// {F, G}(s) = grad F^T J grad G for supplied gradients.
inline double bracket(const Vector8& grad_f, const Vector8& grad_g, const MixedState& s) {
  return grad_f.dot(poisson_tensor(s) * grad_g);
}

inline double bracket(const ScalarField& f, const ScalarField& g, const MixedState& s) {
  return bracket(numeric_gradient(f, s), numeric_gradient(g, s), s);
}

/// Jacobi identity residual max_{ijk} |sum_l J_il d_l J_jk + cyclic| with
/// central differences of step h for the tensor derivatives. The differences
/// are taken in extended precision so that rounding of the trigonometric
/// entries does not swamp the truncation error.
inline double jacobi_residual(const MixedState& s, double h = 1e-6) {
  using Ext = long double;
  using Vec = Eigen::Matrix<Ext, 8, 1>;
  using Mat = Eigen::Matrix<Ext, 8, 8>;
  const Vec x = s.vector().cast<Ext>();
  const Mat J = poisson_tensor_t<Ext>(x);
  std::array<Mat, 8> dJ;
  for (int l = 0; l < 8; ++l) {
    Vec xp = x, xm = x;
    xp[l] += h;
    xm[l] -= h;
    dJ[l] = (poisson_tensor_t<Ext>(xp) - poisson_tensor_t<Ext>(xm)) / (xp[l] - xm[l]);
  }
  Ext worst = 0.0;
  for (int i = 0; i < 8; ++i)
    for (int j = 0; j < 8; ++j)
      for (int k = 0; k < 8; ++k) {
        Ext sum = 0.0;
        for (int l = 0; l < 8; ++l)
          sum += J(i, l) * dJ[l](j, k) + J(j, l) * dJ[l](k, i) + J(k, l) * dJ[l](i, j);
        worst = std::max(worst, std::abs(sum));
      }
  return static_cast<double>(worst);
}

/// Exact partial derivative of the Poisson tensor along coordinate l.
inline Matrix8 poisson_tensor_derivative(const MixedState& s, int l) {
  Matrix8 D = Matrix8::Zero();
  if (l >= 2 && l <= 4) {
    double e[3] = {0.0, 0.0, 0.0};
    e[l - 2] = 1.0;
    D.block<3, 3>(2, 2) = hat(e[0], e[1], e[2]);
    return D;
  }
  if (l != 6 && l != 7) return D;
  require_regular_angle(s.theta);
  const double csc = 1.0 / std::sin(s.theta);
  const double cot = std::cos(s.theta) * csc;
  const double sp = std::sin(s.psi), cp = std::cos(s.psi);
  Eigen::Matrix3d dK;
  if (l == 6)
    dK << -csc * cot * cp, -csc * cot * sp, 0.0,
          0.0, 0.0, 0.0,
          csc * csc * cp, csc * csc * sp, 0.0;
  else
    dK << -csc * sp, csc * cp, 0.0,
          -cp, -sp, 0.0,
          cot * sp, -cot * cp, 0.0;
  D.block<3, 3>(2, 5) = -dK.transpose();
  D.block<3, 3>(5, 2) = dK;
  return D;
}

/// Jacobi identity residual with exact tensor derivatives.
inline double jacobi_residual_exact(const MixedState& s) {
  const Matrix8 J = poisson_tensor(s);
  std::array<Matrix8, 8> dJ;
  for (int l = 0; l < 8; ++l) dJ[l] = poisson_tensor_derivative(s, l);
  double worst = 0.0;
  for (int i = 0; i < 8; ++i)
    for (int j = 0; j < 8; ++j)
      for (int k = 0; k < 8; ++k) {
        double sum = 0.0;
        for (int l = 0; l < 8; ++l)
          sum += J(i, l) * dJ[l](j, k) + J(j, l) * dJ[l](k, i) + J(k, l) * dJ[l](i, j);
        worst = std::max(worst, std::abs(sum));
      }
  return worst;
}

}  // namespace bgpp
