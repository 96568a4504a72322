#pragma once

// Closed-form solutions of the Euler system in the reparametrized time tau,
//   dM1/dtau = (t3 - t2) M2 M3,  dM2/dtau = (t1 - t3) M3 M1,  dM3/dtau = (t2 - t1) M1 M2,
// on a level set C = m^2, I = n^2.
//
// Solutions are built in the ascending frame s1 < s2 < s3 and mapped back to the
// caller's parameter order. An odd relabeling reverses the sign of tau.

#include <array>
#include <cmath>
#include <string>

#include "bgpp/errors.hpp"
#include "bgpp/metric.hpp"
#include "bgpp/reduced_flow.hpp"
#include "bgpp/special_functions.hpp"

namespace bgpp {

inline constexpr double kDefaultCaseTol = 1e-9;

/// I: s3 > n^2/m^2 > s2, II: s2 > n^2/m^2 > s1, III: n^2/m^2 = s2 (separatrix).
/// Axial: two equal parameters; one component is conserved and the rest rotate.
enum class EulerCaseId { I, II, III, Axial };

constexpr const char* to_string(EulerCaseId id) {
  switch (id) {
    case EulerCaseId::I: return "I";
    case EulerCaseId::II: return "II";
    case EulerCaseId::III: return "III";
    case EulerCaseId::Axial: return "Axial";
  }
  return "?";
}

struct EulerCase {
  EulerCaseId case_id = EulerCaseId::I;
  double k2 = 0;
  double sigma_rate = 0;               // d sigma / d tau in the ascending frame
  std::array<double, 3> amplitudes{};  // ascending frame
  std::array<int, 3> signs{1, 1, 1};   // ascending frame
  double tau0 = 0;                     // sigma = sigma_rate * (tau' - tau0)
  double sigma0 = 0;                   // sigma at tau = 0
  bool ill_conditioned = false;        // k^2 within 1e-9 of 1

  // Frame bookkeeping.
  std::array<int, 3> order{0, 1, 2};
  int parity = 1;
  int axis = -1;  // ascending index of the conserved component (Axial only)
  LevelSet levels;
};

namespace detail {

inline void require_positive_casimir(const LevelSet& lv) {
  if (!(lv.m2 > 0.0)) throw Error(ErrorKind::ZeroCasimir, "Casimir m^2 must be positive");
}

inline int sign_of(double x) { return x < 0.0 ? -1 : 1; }

}  // namespace detail

inline EulerCaseId classify_case(const LevelSet& lv, const MetricParams& p, double tol = kDefaultCaseTol) {
  detail::require_positive_casimir(lv);
  const auto& s = p.sorted;
  const double slack = tol * std::max(1.0, s[2]) * lv.m2;
  if (lv.n2 < s[0] * lv.m2 - slack || lv.n2 > s[2] * lv.m2 + slack)
    throw Error(ErrorKind::UnattainableLevel, "n^2 outside [t_min m^2, t_max m^2]");
  if (p.nearly_equal(s[0], s[1]) || p.nearly_equal(s[1], s[2])) return EulerCaseId::Axial;
  const double ratio = lv.n2 / lv.m2;
  if (std::abs(ratio - s[1]) <= tol * std::max(1.0, std::abs(s[1]))) return EulerCaseId::III;
  return ratio > s[1] ? EulerCaseId::I : EulerCaseId::II;
}

namespace detail {

inline std::array<double, 3> evaluate_ascending(const EulerCase& sol, double tau_ascending) {
  const auto& amp = sol.amplitudes;
  const auto& sg = sol.signs;
  const double sigma = sol.sigma_rate * tau_ascending + sol.sigma0;
  switch (sol.case_id) {
    case EulerCaseId::I: {
      const JacobiTriple j = jacobi_sn_cn_dn(sigma, sol.k2);
      return {sg[0] * amp[0] * j.cn, sg[1] * amp[1] * j.sn, sg[2] * amp[2] * j.dn};
    }
    case EulerCaseId::II: {
      const JacobiTriple j = jacobi_sn_cn_dn(sigma, sol.k2);
      return {sg[0] * amp[0] * j.dn, sg[1] * amp[1] * j.sn, sg[2] * amp[2] * j.cn};
    }
    case EulerCaseId::III: {
      const double sech = std::isinf(sigma) ? 0.0 : 1.0 / std::cosh(sigma);
      return {sg[0] * amp[0] * sech, sg[1] * amp[1] * std::tanh(sigma), sg[2] * amp[2] * sech};
    }
    case EulerCaseId::Axial: {
      if (sol.axis == 2) return {amp[0] * std::sin(sigma), amp[1] * std::cos(sigma), amp[2]};
      return {amp[0], amp[1] * std::cos(sigma), amp[2] * std::sin(sigma)};
    }
  }
  return {};
}

}  // namespace detail

inline std::array<double, 3> eval_solution(const EulerCase& sol, double tau) {
  const std::array<double, 3> n = detail::evaluate_ascending(sol, sol.parity * tau);
  std::array<double, 3> m{};
  for (int i = 0; i < 3; ++i) m[sol.order[i]] = n[i];
  return m;
}

/// Amplitudes, modulus and rate from the level set; signs and phase fitted so
/// that the solution at tau = 0 equals `initial_M` (literal parameter order).
inline EulerCase build_solution(const LevelSet& lv, const MetricParams& p, const std::array<double, 3>& initial_M,
                                double tol = kDefaultCaseTol) {
  detail::require_positive_casimir(lv);
  const double c0 = initial_M[0] * initial_M[0] + initial_M[1] * initial_M[1] + initial_M[2] * initial_M[2];
  const double i0 = p.t[0] * initial_M[0] * initial_M[0] + p.t[1] * initial_M[1] * initial_M[1] +
                    p.t[2] * initial_M[2] * initial_M[2];
  const double i_scale = std::max({1.0, std::abs(lv.n2), p.t_max * lv.m2});
  if (std::abs(c0 - lv.m2) > tol * std::max(1.0, lv.m2) || std::abs(i0 - lv.n2) > tol * i_scale)
    throw Error(ErrorKind::InconsistentInitialData, "initial M does not reproduce the level set (C, I)");

  EulerCase sol;
  sol.case_id = classify_case(lv, p, tol);
  sol.order = p.order;
  sol.parity = p.order_parity();
  sol.levels = lv;

  const auto& s = p.sorted;
  const std::array<double, 3> n0 = {initial_M[p.order[0]], initial_M[p.order[1]], initial_M[p.order[2]]};
  const double m2 = lv.m2, n2 = lv.n2;
  const double upper = std::max(0.0, m2 * s[2] - n2);  // m^2 s3 - n^2
  const double lower = std::max(0.0, n2 - m2 * s[0]);  // n^2 - m^2 s1

  switch (sol.case_id) {
    case EulerCaseId::I: {
      sol.amplitudes = {std::sqrt(upper / (s[2] - s[0])), std::sqrt(upper / (s[2] - s[1])),
                        std::sqrt(lower / (s[2] - s[0]))};
      sol.sigma_rate = std::sqrt((s[2] - s[1]) * lower);
      sol.k2 = std::min(1.0, (s[1] - s[0]) * upper / ((s[2] - s[1]) * lower));
      const int e3 = detail::sign_of(n0[2]);
      sol.signs = {-e3, 1, e3};
      if (sol.amplitudes[0] > 0.0 && sol.amplitudes[1] > 0.0) {
        const double sn0 = n0[1] / (sol.signs[1] * sol.amplitudes[1]);
        const double cn0 = n0[0] / (sol.signs[0] * sol.amplitudes[0]);
        sol.sigma0 = elliptic_F(std::atan2(sn0, cn0), sol.k2);
      }
      break;
    }
    case EulerCaseId::II: {
      sol.amplitudes = {std::sqrt(upper / (s[2] - s[0])), std::sqrt(lower / (s[1] - s[0])),
                        std::sqrt(lower / (s[2] - s[0]))};
      sol.sigma_rate = std::sqrt((s[1] - s[0]) * upper);
      sol.k2 = std::min(1.0, (s[2] - s[1]) * lower / ((s[1] - s[0]) * upper));
      const int e1 = detail::sign_of(n0[0]);
      sol.signs = {e1, 1, -e1};
      if (sol.amplitudes[1] > 0.0 && sol.amplitudes[2] > 0.0) {
        const double sn0 = n0[1] / (sol.signs[1] * sol.amplitudes[1]);
        const double cn0 = n0[2] / (sol.signs[2] * sol.amplitudes[2]);
        sol.sigma0 = elliptic_F(std::atan2(sn0, cn0), sol.k2);
      }
      break;
    }
    case EulerCaseId::III: {
      const double m = std::sqrt(m2);
      sol.amplitudes = {m * std::sqrt((s[2] - s[1]) / (s[2] - s[0])), m, m * std::sqrt((s[1] - s[0]) / (s[2] - s[0]))};
      sol.sigma_rate = m * std::sqrt((s[2] - s[1]) * (s[1] - s[0]));
      sol.k2 = 1.0;
      const int e1 = detail::sign_of(n0[0]);
      const int e3 = n0[2] == 0.0 ? -e1 : detail::sign_of(n0[2]);
      sol.signs = {e1, -e1 * e3, e3};
      const double x = std::clamp(n0[1] / (sol.signs[1] * m), -1.0, 1.0);
      sol.sigma0 = std::atanh(x);
      break;
    }
    case EulerCaseId::Axial: {
      const bool lower_pair = p.nearly_equal(s[0], s[1]);
      const bool isotropic = lower_pair && p.nearly_equal(s[1], s[2]);
      if (lower_pair) {
        sol.axis = 2;
        const double mu = std::hypot(n0[0], n0[1]);
        sol.amplitudes = {mu, mu, n0[2]};
        sol.sigma_rate = isotropic ? 0.0 : (s[2] - 0.5 * (s[0] + s[1])) * n0[2];
        sol.sigma0 = std::atan2(n0[0], n0[1]);
      } else {
        sol.axis = 0;
        const double mu = std::hypot(n0[1], n0[2]);
        sol.amplitudes = {n0[0], mu, mu};
        sol.sigma_rate = (0.5 * (s[1] + s[2]) - s[0]) * n0[0];
        sol.sigma0 = std::atan2(n0[2], n0[1]);
      }
      break;
    }
  }

  sol.ill_conditioned = (sol.case_id == EulerCaseId::I || sol.case_id == EulerCaseId::II) && sol.k2 > 1.0 - 1e-9;
  sol.tau0 = sol.sigma_rate != 0.0 ? -sol.sigma0 / sol.sigma_rate : 0.0;

  const std::array<double, 3> fitted = eval_solution(sol, 0.0);
  const double scale = std::sqrt(std::max(1.0, m2));
  for (int i = 0; i < 3; ++i)
    if (std::abs(fitted[i] - initial_M[i]) > std::max(1e-9, std::sqrt(tol)) * scale)
      throw Error(ErrorKind::InconsistentInitialData,
                  "no sign branch reproduces the initial data (component " + std::to_string(i + 1) + ")");
  return sol;
}

}  // namespace bgpp
