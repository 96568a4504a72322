#pragma once

// Dormand-Prince 8(5,3) explicit Runge-Kutta integration with a PI step-size
// controller, applied to the full, reduced and Eguchi-Hanson flows.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "bgpp/eguchi_hanson.hpp"
#include "bgpp/errors.hpp"
#include "bgpp/full_flow.hpp"
#include "bgpp/metric.hpp"
#include "bgpp/reduced_flow.hpp"

namespace bgpp {

namespace dop853 {

// Coefficients of Hairer's DOP853 tableau.
inline constexpr double c2 = 0.526001519587677318785587544488e-01;
inline constexpr double c3 = 0.789002279381515978178381316732e-01;
inline constexpr double c4 = 0.118350341907227396726757197510e+00;
inline constexpr double c5 = 0.281649658092772603273242802490e+00;
inline constexpr double c6 = 0.333333333333333333333333333333e+00;
inline constexpr double c7 = 0.25e+00;
inline constexpr double c8 = 0.307692307692307692307692307692e+00;
inline constexpr double c9 = 0.651282051282051282051282051282e+00;
inline constexpr double c10 = 0.6e+00;
inline constexpr double c11 = 0.857142857142857142857142857142e+00;
inline constexpr double a21 = 5.26001519587677318785587544488e-2;
inline constexpr double a31 = 1.97250569845378994544595329183e-2;
inline constexpr double a32 = 5.91751709536136983633785987549e-2;
inline constexpr double a41 = 2.95875854768068491816892993775e-2;
inline constexpr double a43 = 8.87627564304205475450678981324e-2;
inline constexpr double a51 = 2.41365134159266685502369798665e-1;
inline constexpr double a53 = -8.84549479328286085344864962717e-1;
inline constexpr double a54 = 9.24834003261792003115737966543e-1;
inline constexpr double a61 = 3.7037037037037037037037037037e-2;
inline constexpr double a64 = 1.70828608729473871279604482173e-1;
inline constexpr double a65 = 1.25467687566822425016691814123e-1;
inline constexpr double a71 = 3.7109375e-2;
inline constexpr double a74 = 1.70252211019544039314978060272e-1;
inline constexpr double a75 = 6.02165389804559606850219397283e-2;
inline constexpr double a76 = -1.7578125e-2;
inline constexpr double a81 = 3.70920001185047927108779319836e-2;
inline constexpr double a84 = 1.70383925712239993810214054705e-1;
inline constexpr double a85 = 1.07262030446373284651809199168e-1;
inline constexpr double a86 = -1.53194377486244017527936158236e-2;
inline constexpr double a87 = 8.27378916381402288758473766002e-3;
inline constexpr double a91 = 6.24110958716075717114429577812e-1;
inline constexpr double a94 = -3.36089262944694129406857109825e0;
inline constexpr double a95 = -8.68219346841726006818189891453e-1;
inline constexpr double a96 = 2.75920996994467083049415600797e1;
inline constexpr double a97 = 2.01540675504778934086186788979e1;
inline constexpr double a98 = -4.34898841810699588477366255144e1;
inline constexpr double a101 = 4.77662536438264365890433908527e-1;
inline constexpr double a104 = -2.48811461997166764192642586468e0;
inline constexpr double a105 = -5.90290826836842996371446475743e-1;
inline constexpr double a106 = 2.12300514481811942347288949897e1;
inline constexpr double a107 = 1.52792336328824235832596922938e1;
inline constexpr double a108 = -3.32882109689848629194453265587e1;
inline constexpr double a109 = -2.03312017085086261358222928593e-2;
inline constexpr double a111 = -9.3714243008598732571704021658e-1;
inline constexpr double a114 = 5.18637242884406370830023853209e0;
inline constexpr double a115 = 1.09143734899672957818500254654e0;
inline constexpr double a116 = -8.14978701074692612513997267357e0;
inline constexpr double a117 = -1.85200656599969598641566180701e1;
inline constexpr double a118 = 2.27394870993505042818970056734e1;
inline constexpr double a119 = 2.49360555267965238987089396762e0;
inline constexpr double a1110 = -3.0467644718982195003823669022e0;
inline constexpr double a121 = 2.27331014751653820792359768449e0;
inline constexpr double a124 = -1.05344954667372501984066689879e1;
inline constexpr double a125 = -2.00087205822486249909675718444e0;
inline constexpr double a126 = -1.79589318631187989172765950534e1;
inline constexpr double a127 = 2.79488845294199600508499808837e1;
inline constexpr double a128 = -2.85899827713502369474065508674e0;
inline constexpr double a129 = -8.87285693353062954433549289258e0;
inline constexpr double a1210 = 1.23605671757943030647266201528e1;
inline constexpr double a1211 = 6.43392746015763530355970484046e-1;
inline constexpr double b1 = 5.42937341165687622380535766363e-2;
inline constexpr double b6 = 4.45031289275240888144113950566e0;
inline constexpr double b7 = 1.89151789931450038304281599044e0;
inline constexpr double b8 = -5.8012039600105847814672114227e0;
inline constexpr double b9 = 3.1116436695781989440891606237e-1;
inline constexpr double b10 = -1.52160949662516078556178806805e-1;
inline constexpr double b11 = 2.01365400804030348374776537501e-1;
inline constexpr double b12 = 4.47106157277725905176885569043e-2;
inline constexpr double e31 = 0.244094488188976377952755905512e+00;
inline constexpr double e32 = 0.733846688281611857341361741547e+00;
inline constexpr double e33 = 0.220588235294117647058823529412e-01;
inline constexpr double e51 = 0.1312004499419488073250102996e-01;
inline constexpr double e56 = -0.1225156446376204440720569753e+01;
inline constexpr double e57 = -0.4957589496572501915214079952e+00;
inline constexpr double e58 = 0.1664377182454986536961530415e+01;
inline constexpr double e59 = -0.3503288487499736816886487290e+00;
inline constexpr double e510 = 0.3341791187130174790297318841e+00;
inline constexpr double e511 = 0.8192320648511571246570742613e-01;
inline constexpr double e512 = -0.2235530786388629525884427845e-01;

}  // namespace dop853

enum class Flow { Full, Reduced, EH };

constexpr const char* to_string(Flow f) {
  switch (f) {
    case Flow::Full: return "full";
    case Flow::Reduced: return "reduced";
    case Flow::EH: return "eh";
  }
  return "?";
}

struct IntegratorConfig {
  double rel_tol = 1e-10;
  double abs_tol = 1e-12;
  long max_steps = 1'000'000;
  double sample_stride = 0.0;  // lambda spacing of samples; 0 records every accepted step
  double initial_step = 0.0;   // 0 picks one automatically
  double fixed_step = 0.0;     // > 0 switches off error control

  void validate() const {
    if (!(rel_tol > 0.0) || !(abs_tol > 0.0) || !std::isfinite(rel_tol) || !std::isfinite(abs_tol))
      throw Error(ErrorKind::DomainError, "integrator tolerances must be positive and finite");
    if (max_steps < 1) throw Error(ErrorKind::DomainError, "max_steps must be at least 1");
    if (!(sample_stride >= 0.0) || !std::isfinite(sample_stride))
      throw Error(ErrorKind::DomainError, "sample stride must be finite and non-negative");
    if (!(initial_step >= 0.0) || !(fixed_step >= 0.0))
      throw Error(ErrorKind::DomainError, "step sizes must be non-negative");
  }
};

struct Sample {
  double lambda = 0;
  std::vector<double> state;
  std::vector<double> integrals;
};

struct DriftEntry {
  std::string name;
  double initial = 0;
  double scale = 0;
  double max_relative = 0;
};

struct Trajectory {
  std::vector<std::string> state_names;
  std::vector<std::string> integral_names;
  std::vector<Sample> samples;
  std::vector<DriftEntry> drift_report;
  long accepted_steps = 0;
  long rejected_steps = 0;

  double max_drift() const {
    double worst = 0.0;
    for (const auto& d : drift_report) worst = std::max(worst, d.max_relative);
    return worst;
  }
  const Sample& back() const { return samples.back(); }
};

// ---------------------------------------------------------------------------
// Flow systems

namespace detail {

inline double relative_to(double value, double initial, double scale) {
  const double diff = std::abs(value - initial);
  return scale > 0.0 ? diff / scale : diff;
}

}  // namespace detail

struct FullSystem {
  static constexpr std::size_t N = 8;
  using Array = std::array<double, N>;
  MetricParams params;

  Array rhs(const Array& y) const { return rhs_full(MixedState::from(y), params).array(); }
  std::vector<double> integrals(const Array& y) const {
    const IntegralValues v = bgpp::integrals(MixedState::from(y), params);
    return {v.H, v.P_phi, v.C, v.I};
  }
  std::vector<double> drift_scales(const std::vector<double>& v0) const {
    return {std::abs(v0[0]), std::max(std::abs(v0[1]), std::sqrt(v0[2])), v0[2],
            std::max(std::abs(v0[3]), params.t_max * v0[2])};
  }
  static std::vector<std::string> state_names() { return {"t", "P_t", "M1", "M2", "M3", "phi", "theta", "psi"}; }
  static std::vector<std::string> integral_names() { return {"H", "P_phi", "C", "I"}; }
};

struct ReducedSystem {
  static constexpr std::size_t N = 5;
  using Array = std::array<double, N>;
  MetricParams params;

  Array rhs(const Array& y) const { return rhs_reduced(ReducedState::from(y), params).array(); }
  std::vector<double> integrals(const Array& y) const {
    const LevelSet lv = levels_from_state(ReducedState::from(y), params);
    return {lv.e, lv.m2, lv.n2};
  }
  std::vector<double> drift_scales(const std::vector<double>& v0) const {
    return {std::abs(v0[0]), v0[1], std::max(std::abs(v0[2]), params.t_max * v0[1])};
  }
  static std::vector<std::string> state_names() { return {"t", "P_t", "M1", "M2", "M3"}; }
  static std::vector<std::string> integral_names() { return {"H", "C", "I"}; }
};

/// Reduced flow with tau appended as a sixth variable, dtau/dlambda = 4 f^2.
struct ReducedTauSystem {
  static constexpr std::size_t N = 6;
  using Array = std::array<double, N>;
  MetricParams params;

  Array rhs(const Array& y) const {
    const ReducedState s{y[0], y[1], y[2], y[3], y[4]};
    const ReducedState d = rhs_reduced(s, params);
    return {d.t, d.P_t, d.M1, d.M2, d.M3, 4.0 * profile(params, s.t).f2};
  }
  std::vector<double> integrals(const Array& y) const {
    const LevelSet lv = levels_from_state({y[0], y[1], y[2], y[3], y[4]}, params);
    return {lv.e, lv.m2, lv.n2};
  }
  std::vector<double> drift_scales(const std::vector<double>& v0) const {
    return {std::abs(v0[0]), v0[1], std::max(std::abs(v0[2]), params.t_max * v0[1])};
  }
  static std::vector<std::string> state_names() { return {"t", "P_t", "M1", "M2", "M3", "tau"}; }
  static std::vector<std::string> integral_names() { return {"H", "C", "I"}; }
};

struct EHSystem {
  static constexpr std::size_t N = 5;
  using Array = std::array<double, N>;
  double gamma2 = 1.0;

  Array rhs(const Array& y) const { return eh_rhs(EHState::from(y), gamma2).array(); }
  std::vector<double> integrals(const Array& y) const {
    const EHState s = EHState::from(y);
    return {eh_hamiltonian(s, gamma2), s.M3, s.M1 * s.M1 + s.M2 * s.M2};
  }
  std::vector<double> drift_scales(const std::vector<double>& v0) const {
    const double c = v0[2] + v0[1] * v0[1];
    return {std::abs(v0[0]), std::max(std::abs(v0[1]), std::sqrt(c)), c};
  }
  static std::vector<std::string> state_names() { return {"rho", "P_rho", "M1", "M2", "M3"}; }
  static std::vector<std::string> integral_names() { return {"H", "M3", "mu2"}; }
};

// ---------------------------------------------------------------------------
// Stepper

namespace detail {

inline bool is_domain_failure(ErrorKind k) {
  return k == ErrorKind::DomainError || k == ErrorKind::SingularPoint || k == ErrorKind::NonFinite;
}

/// Evaluates the right-hand side; false if the point lies outside the flow's domain.
template <class System>
bool evaluate(const System& sys, const typename System::Array& y, typename System::Array& k) {
  try {
    k = sys.rhs(y);
  } catch (const Error& e) {
    if (is_domain_failure(e.kind())) return false;
    throw;
  }
  for (double v : k)
    if (!std::isfinite(v)) return false;
  return true;
}

/// One DOP853 step from (y, k1) with step h. Writes the 8th-order update and
/// the scaled error norm; false if a stage left the domain.
template <class System>
bool dop853_step(const System& sys, const typename System::Array& y, const typename System::Array& k1, double h,
                 double rel_tol, double abs_tol, typename System::Array& y_new, double& err) {
  using namespace dop853;
  constexpr std::size_t n = System::N;
  using Array = typename System::Array;
  Array k2, k3, k4, k5, k6, k7, k8, k9, k10, k11, k12, w;

  const auto stage = [&](Array& out, auto&& combine) {
    for (std::size_t i = 0; i < n; ++i) w[i] = y[i] + h * combine(i);
    return evaluate(sys, w, out);
  };

  if (!stage(k2, [&](std::size_t i) { return a21 * k1[i]; })) return false;
  if (!stage(k3, [&](std::size_t i) { return a31 * k1[i] + a32 * k2[i]; })) return false;
  if (!stage(k4, [&](std::size_t i) { return a41 * k1[i] + a43 * k3[i]; })) return false;
  if (!stage(k5, [&](std::size_t i) { return a51 * k1[i] + a53 * k3[i] + a54 * k4[i]; })) return false;
  if (!stage(k6, [&](std::size_t i) { return a61 * k1[i] + a64 * k4[i] + a65 * k5[i]; })) return false;
  if (!stage(k7, [&](std::size_t i) { return a71 * k1[i] + a74 * k4[i] + a75 * k5[i] + a76 * k6[i]; }))
    return false;
  if (!stage(k8, [&](std::size_t i) {
        return a81 * k1[i] + a84 * k4[i] + a85 * k5[i] + a86 * k6[i] + a87 * k7[i];
      }))
    return false;
  if (!stage(k9, [&](std::size_t i) {
        return a91 * k1[i] + a94 * k4[i] + a95 * k5[i] + a96 * k6[i] + a97 * k7[i] + a98 * k8[i];
      }))
    return false;
  if (!stage(k10, [&](std::size_t i) {
        return a101 * k1[i] + a104 * k4[i] + a105 * k5[i] + a106 * k6[i] + a107 * k7[i] + a108 * k8[i] +
               a109 * k9[i];
      }))
    return false;
  if (!stage(k11, [&](std::size_t i) {
        return a111 * k1[i] + a114 * k4[i] + a115 * k5[i] + a116 * k6[i] + a117 * k7[i] + a118 * k8[i] +
               a119 * k9[i] + a1110 * k10[i];
      }))
    return false;
  if (!stage(k12, [&](std::size_t i) {
        return a121 * k1[i] + a124 * k4[i] + a125 * k5[i] + a126 * k6[i] + a127 * k7[i] + a128 * k8[i] +
               a129 * k9[i] + a1210 * k10[i] + a1211 * k11[i];
      }))
    return false;

  double err3 = 0.0, err5 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double slope =
        b1 * k1[i] + b6 * k6[i] + b7 * k7[i] + b8 * k8[i] + b9 * k9[i] + b10 * k10[i] + b11 * k11[i] + b12 * k12[i];
    y_new[i] = y[i] + h * slope;
    const double sk = abs_tol + rel_tol * std::max(std::abs(y[i]), std::abs(y_new[i]));
    const double e3 = slope - e31 * k1[i] - e32 * k9[i] - e33 * k12[i];
    const double e5 = e51 * k1[i] + e56 * k6[i] + e57 * k7[i] + e58 * k8[i] + e59 * k9[i] + e510 * k10[i] +
                      e511 * k11[i] + e512 * k12[i];
    err3 += (e3 / sk) * (e3 / sk);
    err5 += (e5 / sk) * (e5 / sk);
  }
  double deno = err5 + 0.01 * err3;
  if (deno <= 0.0) deno = 1.0;
  err = std::abs(h) * err5 / std::sqrt(static_cast<double>(n) * deno);
  for (double v : y_new)
    if (!std::isfinite(v)) return false;
  return true;
}

/// Starting step from the size of y, f(y) and a difference estimate of f'.
template <class System>
double initial_step(const System& sys, const typename System::Array& y, const typename System::Array& k1,
                    double direction, double span, const IntegratorConfig& cfg) {
  constexpr std::size_t n = System::N;
  double d0 = 0.0, d1 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double sk = cfg.abs_tol + cfg.rel_tol * std::abs(y[i]);
    d0 += (y[i] / sk) * (y[i] / sk);
    d1 += (k1[i] / sk) * (k1[i] / sk);
  }
  d0 = std::sqrt(d0 / n);
  d1 = std::sqrt(d1 / n);
  double h0 = (d0 <= 1e-10 || d1 <= 1e-10) ? 1e-6 : 0.01 * d0 / d1;
  h0 = std::min(h0, span);

  typename System::Array y1, k2;
  for (int attempt = 0; attempt < 60; ++attempt) {
    for (std::size_t i = 0; i < n; ++i) y1[i] = y[i] + direction * h0 * k1[i];
    if (evaluate(sys, y1, k2)) break;
    h0 *= 0.1;
  }
  double d2 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double sk = cfg.abs_tol + cfg.rel_tol * std::abs(y[i]);
    d2 += ((k2[i] - k1[i]) / sk) * ((k2[i] - k1[i]) / sk);
  }
  d2 = std::sqrt(d2 / n) / h0;
  const double dm = std::max(d1, d2);
  const double h1 = dm <= 1e-15 ? std::max(1e-6, 1e-3 * h0) : std::pow(0.01 / dm, 1.0 / 8.0);
  return std::min({100.0 * h0, h1, span});
}

}  // namespace detail

/// Integrates `sys` from y0 over lambda in [l0, l1] (l1 < l0 runs backwards).
template <class System>
Trajectory integrate_system(const System& sys, const typename System::Array& y0, double l0, double l1,
                            const IntegratorConfig& cfg) {
  using Array = typename System::Array;
  cfg.validate();
  if (!std::isfinite(l0) || !std::isfinite(l1)) throw Error(ErrorKind::NonFinite, "integration span not finite");

  Trajectory traj;
  traj.state_names = System::state_names();
  traj.integral_names = System::integral_names();

  Array k1;
  if (!detail::evaluate(sys, y0, k1))
    throw Error(ErrorKind::DomainError, "initial state lies outside the domain of the flow");

  const std::vector<double> v0 = sys.integrals(y0);
  const std::vector<double> scales = sys.drift_scales(v0);
  for (std::size_t i = 0; i < v0.size(); ++i) traj.drift_report.push_back({traj.integral_names[i], v0[i], scales[i], 0.0});

  const auto record = [&](double lambda, const Array& y) {
    Sample s;
    s.lambda = lambda;
    s.state.assign(y.begin(), y.end());
    s.integrals = sys.integrals(y);
    for (std::size_t i = 0; i < s.integrals.size(); ++i)
      traj.drift_report[i].max_relative = std::max(traj.drift_report[i].max_relative,
                                                   detail::relative_to(s.integrals[i], v0[i], scales[i]));
    traj.samples.push_back(std::move(s));
  };

  record(l0, y0);
  if (l0 == l1) return traj;

  const double direction = l1 > l0 ? 1.0 : -1.0;
  const double span = std::abs(l1 - l0);
  const bool strided = cfg.sample_stride > 0.0;
  long next_sample_index = 1;
  const auto next_target = [&]() {
    if (!strided) return l1;
    const double target = l0 + direction * cfg.sample_stride * static_cast<double>(next_sample_index);
    return direction * (target - l1) >= 0.0 ? l1 : target;
  };

  Array y = y0, y_new, k_new;
  double lambda = l0;
  const bool fixed = cfg.fixed_step > 0.0;
  double h = fixed ? cfg.fixed_step
                   : (cfg.initial_step > 0.0 ? std::min(cfg.initial_step, span)
                                             : detail::initial_step(sys, y, k1, direction, span, cfg));
  double facold = 1e-4;
  bool last_rejected = false;
  bool last_failure_domain = false;
  constexpr double beta = 0.04, safe = 0.9, fac_shrink = 1.0 / 0.333, fac_grow = 1.0 / 6.0;
  const double expo1 = 1.0 / 8.0 - 0.2 * beta;

  while (direction * (l1 - lambda) > 0.0) {
    if (traj.accepted_steps + traj.rejected_steps >= cfg.max_steps)
      throw Error(ErrorKind::StepFailure, "max_steps exceeded at lambda = " + std::to_string(lambda));
    const double target = next_target();
    const double remaining = std::abs(target - lambda);
    // Absorb a round-off sliver left before the target into this step.
    const bool lands = h * (1.0 + 1e-10) >= remaining;
    const double h_take = lands ? remaining : h;
    if (h_take < 16.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(lambda)))
      throw Error(last_failure_domain ? ErrorKind::DomainExit : ErrorKind::StepFailure,
                  std::string(last_failure_domain ? "trajectory leaves the domain" : "step size underflow") +
                      " at lambda = " + std::to_string(lambda));

    double err = 0.0;
    bool ok = detail::dop853_step(sys, y, k1, direction * h_take, cfg.rel_tol, cfg.abs_tol, y_new, err);
    if (ok) ok = detail::evaluate(sys, y_new, k_new);
    if (!ok) {
      if (fixed)
        throw Error(ErrorKind::DomainExit, "trajectory leaves the domain at lambda = " + std::to_string(lambda));
      ++traj.rejected_steps;
      last_rejected = true;
      last_failure_domain = true;
      h = 0.25 * h_take;
      continue;
    }
    if (fixed) err = 0.0;

    const double fac11 = err > 0.0 ? std::pow(err, expo1) : 0.0;
    if (err <= 1.0) {
      double fac = fac11 / std::pow(facold, beta);
      fac = std::max(fac_grow, std::min(fac_shrink, fac / safe));
      double h_next = h_take / fac;
      if (last_rejected) h_next = std::min(h_next, h_take);
      facold = std::max(err, 1e-4);
      ++traj.accepted_steps;
      lambda = lands ? target : lambda + direction * h_take;
      y = y_new;
      k1 = k_new;
      last_rejected = false;
      last_failure_domain = false;
      if (lands && strided) {
        record(lambda, y);
        ++next_sample_index;
      } else if (!strided) {
        record(lambda, y);
      } else if (lambda == l1) {
        record(lambda, y);
      }
      // A step shortened to land on a sample point should not throttle the next one.
      h = fixed ? cfg.fixed_step : (lands && h_take < h ? std::max(h_next, h) : h_next);
    } else {
      h = h_take / std::min(fac_shrink, fac11 / safe);
      ++traj.rejected_steps;
      last_rejected = true;
      last_failure_domain = false;
    }
  }
  if (traj.samples.back().lambda != l1) record(l1, y);
  return traj;
}

inline Trajectory integrate(const MixedState& s, const MetricParams& p, double l0, double l1,
                            const IntegratorConfig& cfg = {}) {
  return integrate_system(FullSystem{p}, s.array(), l0, l1, cfg);
}

inline Trajectory integrate(const ReducedState& s, const MetricParams& p, double l0, double l1,
                            const IntegratorConfig& cfg = {}) {
  return integrate_system(ReducedSystem{p}, s.array(), l0, l1, cfg);
}

inline Trajectory integrate(const EHState& s, double gamma2, double l0, double l1, const IntegratorConfig& cfg = {}) {
  require_gamma2(gamma2);
  return integrate_system(EHSystem{gamma2}, s.array(), l0, l1, cfg);
}

}  // namespace bgpp
