#pragma once

// Verification drivers: bracket algebra at random states, conservation under
// the numerical flows, closed-form solutions against integrated trajectories,
// the multicentre form, and the Eguchi-Hanson limit and closed forms.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "bgpp/analytic_solutions.hpp"
#include "bgpp/eguchi_hanson.hpp"
#include "bgpp/errors.hpp"
#include "bgpp/full_flow.hpp"
#include "bgpp/integrator.hpp"
#include "bgpp/metric.hpp"
#include "bgpp/reduced_flow.hpp"

namespace bgpp {

inline constexpr std::uint64_t kDefaultSeed = 20260415;

/// Random states away from coordinate singularities: t in (t_max + 0.1, t_max + 10),
/// angles in (0.2, pi - 0.2), momenta in [-3, 3].
class StateSampler {
 public:
  StateSampler(const MetricParams& p, std::uint64_t seed) : params_(p), rng_(seed) {}

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
  double radius() { return uniform(params_.t_max + 0.1, params_.t_max + 10.0); }
  double angle() { return uniform(0.2, std::numbers::pi - 0.2); }
  double momentum() { return uniform(-3.0, 3.0); }

  MixedState full() {
    MixedState s;
    s.t = radius();
    s.P_t = momentum();
    s.M1 = momentum();
    s.M2 = momentum();
    s.M3 = momentum();
    s.phi = angle();
    s.theta = angle();
    s.psi = angle();
    return s;
  }

  ReducedState reduced() {
    ReducedState s;
    s.t = radius();
    s.P_t = momentum();
    s.M1 = momentum();
    s.M2 = momentum();
    s.M3 = momentum();
    return s;
  }

  std::mt19937_64& engine() { return rng_; }

 private:
  MetricParams params_;
  std::mt19937_64 rng_;
};

// ---------------------------------------------------------------------------
// Brackets

struct VerifyTolerances {
  double bracket = 1e-9;
  double jacobi = 1e-12;
  double jacobi_fd = 1e-6;
  double rank_margin = 1e-8;
  double rhs = 1e-12;
  double gradient = 1e-6;
  double drift = 1e-8;
  double radial = 1e-9;
  double analytic = 1e-6;
  double multicentre = 1e-6;
  double multicentre_order = 1.8;
  double eh_limit = 1e-10;
  double eh_tau = 1e-9;
};

struct BracketReport {
  std::uint64_t seed = 0;
  int n_samples = 0;
  std::array<double, 6> full_pairs{};     // {H,P_phi} {H,C} {H,I} {P_phi,C} {P_phi,I} {C,I}
  std::array<double, 3> reduced_pairs{};  // {H,C} {H,I} {C,I}
  double jacobi_full = 0;
  double jacobi_full_fd = 0;
  double jacobi_reduced = 0;
  double casimir_annihilation = 0;
  double full_rank_margin = std::numeric_limits<double>::infinity();
  double reduced_rank_margin = std::numeric_limits<double>::infinity();
  int reduced_tensor_rank_min = 5;
  int reduced_tensor_rank_max = 0;
  double rhs_residual_full = 0;
  double rhs_residual_reduced = 0;
  double gradient_residual = 0;

  double full_bracket_max() const { return *std::max_element(full_pairs.begin(), full_pairs.end()); }
  double reduced_bracket_max() const { return *std::max_element(reduced_pairs.begin(), reduced_pairs.end()); }

  bool full_passed(const VerifyTolerances& tol = {}) const {
    return full_bracket_max() <= tol.bracket && full_rank_margin > tol.rank_margin && jacobi_full <= tol.jacobi &&
           jacobi_full_fd <= tol.jacobi_fd && rhs_residual_full <= tol.rhs && gradient_residual <= tol.gradient;
  }
  bool reduced_passed(const VerifyTolerances& tol = {}) const {
    return reduced_bracket_max() <= tol.bracket && casimir_annihilation == 0.0 && reduced_tensor_rank_min == 4 &&
           reduced_tensor_rank_max == 4 && reduced_rank_margin > tol.rank_margin && jacobi_reduced <= tol.jacobi &&
           rhs_residual_reduced <= tol.rhs;
  }
  bool passed(const VerifyTolerances& tol = {}) const { return full_passed(tol) && reduced_passed(tol); }
};

namespace detail {

template <class Matrix>
double singular_value_margin(const Matrix& m) {
  const auto sv = Eigen::JacobiSVD<Eigen::MatrixXd>(Eigen::MatrixXd(m)).singularValues();
  return sv[0] > 0.0 ? sv[sv.size() - 1] / sv[0] : 0.0;
}

template <class V>
double relative_residual(const V& a, const V& b) {
  double worst = 0.0;
  for (int i = 0; i < a.size(); ++i) worst = std::max(worst, std::abs(a[i] - b[i]) / std::max(1.0, std::abs(b[i])));
  return worst;
}

}  // namespace detail

inline BracketReport verify_bracket_suite(const MetricParams& p, int n_samples, std::uint64_t seed) {
  if (n_samples < 1) throw Error(ErrorKind::DomainError, "bracket suite needs at least one sample");
  BracketReport r;
  r.seed = seed;
  r.n_samples = n_samples;
  StateSampler sampler(p, seed);

  for (int n = 0; n < n_samples; ++n) {
    const MixedState s = sampler.full();
    const std::array<Vector8, 4> g = {hamiltonian_gradient(s, p), p_phi_gradient(s), casimir_gradient(s),
                                      second_integral_gradient(s, p)};
    const Matrix8 J = poisson_tensor(s);
    int pair = 0;
    for (int i = 0; i < 4; ++i)
      for (int j = i + 1; j < 4; ++j, ++pair)
        r.full_pairs[pair] = std::max(r.full_pairs[pair], std::abs(g[i].dot(J * g[j])));

    Eigen::Matrix<double, 4, 8> grads;
    for (int i = 0; i < 4; ++i) grads.row(i) = g[i].transpose();
    r.full_rank_margin = std::min(r.full_rank_margin, detail::singular_value_margin(grads));
    r.jacobi_full = std::max(r.jacobi_full, jacobi_residual_exact(s));
    r.jacobi_full_fd = std::max(r.jacobi_full_fd, jacobi_residual(s));
    r.rhs_residual_full =
        std::max(r.rhs_residual_full, detail::relative_residual(rhs_full(s, p).vector(), Vector8(J * g[0])));

    const ScalarField h_field = [&p](const MixedState& x) { return hamiltonian(x, p); };
    const ScalarField p_phi_field = [](const MixedState& x) {
      return std::sin(x.theta) * (x.M1 * std::cos(x.psi) + x.M2 * std::sin(x.psi)) + x.M3 * std::cos(x.theta);
    };
    r.gradient_residual = std::max(
        {r.gradient_residual, detail::relative_residual(numeric_gradient(h_field, s), g[0]),
         detail::relative_residual(numeric_gradient(p_phi_field, s), g[1])});

    const ReducedState q = sampler.reduced();
    const Vector5 gh = reduced_hamiltonian_gradient(q, p);
    const Vector5 gc = casimir_gradient(q);
    const Vector5 gi = second_integral_gradient(q, p);
    const Matrix5 P = poisson_tensor_reduced(q);
    r.reduced_pairs[0] = std::max(r.reduced_pairs[0], std::abs(gh.dot(P * gc)));
    r.reduced_pairs[1] = std::max(r.reduced_pairs[1], std::abs(gh.dot(P * gi)));
    r.reduced_pairs[2] = std::max(r.reduced_pairs[2], std::abs(gc.dot(P * gi)));
    r.casimir_annihilation = std::max(r.casimir_annihilation, (P * gc).cwiseAbs().maxCoeff());

    Eigen::Matrix<double, 3, 5> rgrads;
    rgrads << gh.transpose(), gc.transpose(), gi.transpose();
    r.reduced_rank_margin = std::min(r.reduced_rank_margin, detail::singular_value_margin(rgrads));
    const auto sv = Eigen::JacobiSVD<Matrix5>(P).singularValues();
    int rank = 0;
    for (int i = 0; i < 5; ++i)
      if (sv[i] > 1e-12 * sv[0]) ++rank;
    r.reduced_tensor_rank_min = std::min(r.reduced_tensor_rank_min, rank);
    r.reduced_tensor_rank_max = std::max(r.reduced_tensor_rank_max, rank);
    r.jacobi_reduced = std::max(r.jacobi_reduced, jacobi_residual_reduced(q));
    r.rhs_residual_reduced =
        std::max(r.rhs_residual_reduced, detail::relative_residual(rhs_reduced(q, p).vector(), Vector5(P * gh)));
  }
  return r;
}

// ---------------------------------------------------------------------------
// Conservation and the separated radial equation

struct ConservationReport {
  std::uint64_t seed = 0;
  int runs = 0;
  double span = 0;
  double max_drift_full = 0;
  double max_drift_reduced = 0;
  double max_radial_residual = 0;  // |tdot^2 - S(t)| / scale along reduced runs
  long steps = 0;

  bool passed(const VerifyTolerances& tol = {}) const {
    return max_drift_full <= tol.drift && max_drift_reduced <= tol.drift && max_radial_residual <= tol.radial;
  }
};

/// max over samples of |tdot^2 - S(t)| relative to the size of the terms in S,
/// with the level set taken from the first sample.
inline double radial_equation_residual(const Trajectory& traj, const MetricParams& p) {
  const auto state_at = [](const Sample& s) {
    return ReducedState{s.state[0], s.state[1], s.state[2], s.state[3], s.state[4]};
  };
  const LevelSet lv = levels_from_state(state_at(traj.samples.front()), p);
  double worst = 0.0;
  for (const Sample& smp : traj.samples) {
    const ReducedState s = state_at(smp);
    const double tdot = rhs_reduced(s, p).t;
    worst = std::max(worst, std::abs(tdot * tdot - s_polynomial(lv, p, s.t)) / s_polynomial_scale(lv, p, s.t));
  }
  return worst;
}

inline ConservationReport verify_conservation(const MetricParams& p, int runs, std::uint64_t seed, double span,
                                              IntegratorConfig cfg = {}) {
  ConservationReport r;
  r.seed = seed;
  r.runs = runs;
  r.span = span;
  StateSampler sampler(p, seed);
  for (int n = 0; n < runs; ++n) {
    const Trajectory full = integrate(sampler.full(), p, 0.0, span, cfg);
    r.max_drift_full = std::max(r.max_drift_full, full.max_drift());
    const Trajectory red = integrate(sampler.reduced(), p, 0.0, span, cfg);
    r.max_drift_reduced = std::max(r.max_drift_reduced, red.max_drift());
    r.max_radial_residual = std::max(r.max_radial_residual, radial_equation_residual(red, p));
    r.steps += full.accepted_steps + red.accepted_steps;
  }
  return r;
}

// ---------------------------------------------------------------------------
// Closed-form Euler solutions against the integrated flow

struct AnalyticReport {
  EulerCaseId case_id = EulerCaseId::I;
  LevelSet levels;
  double k2 = 0;
  bool ill_conditioned = false;
  std::size_t samples = 0;
  int branches = 1;
  std::array<double, 3> max_error{};
  double max_abs_error = 0;
  double tau_ode_mismatch = 0;  // quadrature tau against tau carried along the flow
  double tau_end = 0;

  bool passed(const VerifyTolerances& tol = {}) const { return max_abs_error <= tol.analytic; }
};

namespace detail {

struct Branching {
  std::vector<int> branch_of;        // per sample
  std::vector<double> start;         // radial value at the start of each branch
  std::vector<int> direction;        // +1 outward, -1 inward
};

/// Splits samples into monotone radial branches at sign changes of the radial
/// momentum (component 1). `turn(value_before, direction)` returns the turning point.
template <class Turn>
Branching split_branches(const Trajectory& traj, const Turn& turn) {
  Branching b;
  const auto& smp = traj.samples;
  int dir = 0;
  for (const Sample& s : smp)
    if (s.state[1] != 0.0) {
      dir = s.state[1] > 0.0 ? 1 : -1;
      break;
    }
  if (dir == 0) dir = 1;
  b.start.push_back(smp.front().state[0]);
  b.direction.push_back(dir);
  b.branch_of.push_back(0);
  for (std::size_t j = 1; j < smp.size(); ++j) {
    const double pj = smp[j].state[1];
    if (pj != 0.0 && (pj > 0.0 ? 1 : -1) != dir) {
      b.start.push_back(turn(smp[j - 1].state[0], dir));
      dir = -dir;
      b.direction.push_back(dir);
    }
    b.branch_of.push_back(static_cast<int>(b.start.size()) - 1);
  }
  return b;
}

/// tau at every sample from a radial antiderivative difference `delta(a, b)`,
/// accumulated branch by branch. Radial values are clamped to the turning points.
template <class Delta>
std::vector<double> accumulate_tau(const Trajectory& traj, const Branching& b, const Delta& delta) {
  std::vector<double> offset(b.start.size(), 0.0);
  for (std::size_t k = 1; k < b.start.size(); ++k) offset[k] = offset[k - 1] + std::abs(delta(b.start[k - 1], b.start[k]));
  std::vector<double> tau(traj.samples.size(), 0.0);
  for (std::size_t j = 0; j < traj.samples.size(); ++j) {
    const int k = b.branch_of[j];
    double x = traj.samples[j].state[0];
    // A turning point at the start of a branch bounds it on the side the motion left from.
    if (k > 0) x = b.direction[k] > 0 ? std::max(x, b.start[k]) : std::min(x, b.start[k]);
    if (k + 1 < static_cast<int>(b.start.size()))
      x = b.direction[k] > 0 ? std::min(x, b.start[k + 1]) : std::max(x, b.start[k + 1]);
    tau[j] = offset[k] + std::abs(delta(b.start[k], x));
  }
  return tau;
}

}  // namespace detail

/// Reduced state at t = t_max + 1, P_t = -0.4 with a unit Casimir on the level
/// n^2/m^2 = (s2 + s3)/2 (case I), (s1 + s2)/2 (case II) or s2 (case III).
inline ReducedState representative_state(const MetricParams& p, EulerCaseId id) {
  const auto& s = p.sorted;
  double ratio = s[1];
  if (id == EulerCaseId::I) ratio = 0.5 * (s[1] + s[2]);
  if (id == EulerCaseId::II) ratio = 0.5 * (s[0] + s[1]);
  constexpr double middle = 0.2;  // share of the Casimir on the middle axis
  double n3 = 0.0;
  if (s[2] > s[0]) n3 = std::clamp((ratio - s[1] * middle - s[0] * (1.0 - middle)) / (s[2] - s[0]), 0.0, 1.0 - middle);
  const std::array<double, 3> sorted_m = {std::sqrt(1.0 - middle - n3), std::sqrt(middle), std::sqrt(n3)};
  std::array<double, 3> m{};
  for (int i = 0; i < 3; ++i) m[p.order[i]] = sorted_m[i];
  return {p.t_max + 1.0, -0.4, m[0], m[1], m[2]};
}

inline AnalyticReport verify_analytic_vs_numeric(const LevelSet& lv, const MetricParams& p, const ReducedState& initial,
                                                 double l0, double l1, IntegratorConfig cfg = {}) {
  if (!(l1 > l0)) throw Error(ErrorKind::DomainError, "analytic comparison needs a forward span");
  const EulerCase sol = build_solution(lv, p, {initial.M1, initial.M2, initial.M3});
  if (cfg.sample_stride <= 0.0) cfg.sample_stride = (l1 - l0) / 200.0;

  const Trajectory traj = integrate_system(ReducedTauSystem{p},
                                           {initial.t, initial.P_t, initial.M1, initial.M2, initial.M3, 0.0}, l0, l1, cfg);
  const detail::Branching br = detail::split_branches(
      traj, [&](double t_before, int dir) { return radial_turning_point(lv, p, t_before, dir); });
  const std::vector<double> tau =
      detail::accumulate_tau(traj, br, [&](double a, double b) { return tau_of_t(lv, p, a, b); });

  AnalyticReport r;
  r.case_id = sol.case_id;
  r.levels = lv;
  r.k2 = sol.k2;
  r.ill_conditioned = sol.ill_conditioned;
  r.samples = traj.samples.size();
  r.branches = static_cast<int>(br.start.size());
  for (std::size_t j = 0; j < traj.samples.size(); ++j) {
    const auto& st = traj.samples[j].state;
    const std::array<double, 3> m = eval_solution(sol, tau[j]);
    for (int i = 0; i < 3; ++i) r.max_error[i] = std::max(r.max_error[i], std::abs(m[i] - st[2 + i]));
    r.tau_ode_mismatch = std::max(r.tau_ode_mismatch, std::abs(tau[j] - st[5]));
  }
  r.max_abs_error = *std::max_element(r.max_error.begin(), r.max_error.end());
  r.tau_end = tau.back();
  return r;
}

struct EHAnalyticReport {
  EHLevels levels;
  std::size_t samples = 0;
  int branches = 1;
  double max_error = 0;  // max |M1, M2 numeric - closed form|
  double tau_end = 0;

  bool passed(const VerifyTolerances& tol = {}) const { return max_error <= tol.analytic; }
};

/// EH flow against the rotating (M1, M2) solution with tau from closed-form differences.
inline EHAnalyticReport verify_eh_analytic(const EHState& initial, double gamma2, double l0, double l1,
                                           IntegratorConfig cfg = {}) {
  if (!(l1 > l0)) throw Error(ErrorKind::DomainError, "analytic comparison needs a forward span");
  const EHLevels lv = with_roots(eh_levels_from_state(initial, gamma2));
  const double phi0 = eh_phase(initial.M1, initial.M2);
  if (cfg.sample_stride <= 0.0) cfg.sample_stride = (l1 - l0) / 200.0;
  const Trajectory traj = integrate(initial, gamma2, l0, l1, cfg);

  const double rho3 = lv.roots[2];
  const detail::Branching br = detail::split_branches(traj, [&](double, int dir) {
    if (dir > 0) throw Error(ErrorKind::NoConvergence, "EH radial motion has no upper turning point for e > 0");
    return rho3;
  });
  const std::vector<double> tau = detail::accumulate_tau(traj, br, [&](double a, double b) {
    return eh_tau_closed(lv, std::max(b, rho3)) - eh_tau_closed(lv, std::max(a, rho3));
  });

  EHAnalyticReport r;
  r.levels = lv;
  r.samples = traj.samples.size();
  r.branches = static_cast<int>(br.start.size());
  for (std::size_t j = 0; j < traj.samples.size(); ++j) {
    const auto m = eh_m12_solution(lv, tau[j], phi0);
    const auto& st = traj.samples[j].state;
    r.max_error = std::max({r.max_error, std::abs(m[0] - st[2]), std::abs(m[1] - st[3])});
  }
  r.tau_end = tau.back();
  return r;
}

// ---------------------------------------------------------------------------
// Multicentre form

struct MulticentreReport {
  std::uint64_t seed = 0;
  int n_points = 0;
  double h = 0;
  double max_deviation = 0;
  double order_h = 0;
  double min_order = std::numeric_limits<double>::infinity();

  bool passed(const VerifyTolerances& tol = {}) const {
    return max_deviation <= tol.multicentre && min_order >= tol.multicentre_order;
  }
};

/// Deviation at step h over random points, and the observed order from the
/// deviations at order_h and order_h / 2.
inline MulticentreReport verify_multicentre(const MetricParams& p, int n_points, std::uint64_t seed, double h = 1e-5,
                                            double order_h = 1e-2) {
  MulticentreReport r;
  r.seed = seed;
  r.n_points = n_points;
  r.h = h;
  r.order_h = order_h;
  StateSampler sampler(p, seed);
  for (int n = 0; n < n_points; ++n) {
    const double t = sampler.radius(), theta = sampler.angle(), psi = sampler.angle();
    r.max_deviation = std::max(r.max_deviation, multicentre_check(p, t, theta, psi, h));
    const double coarse = multicentre_check(p, t, theta, psi, order_h);
    const double fine = multicentre_check(p, t, theta, psi, 0.5 * order_h);
    r.min_order = std::min(r.min_order, std::log2(coarse / fine));
  }
  return r;
}

// ---------------------------------------------------------------------------
// Eguchi-Hanson

struct EHLimitReport {
  std::uint64_t seed = 0;
  int n_states = 0;
  double gamma2 = 0;
  double max_rhs_mismatch = 0;
  double max_hamiltonian_mismatch = 0;

  bool passed(const VerifyTolerances& tol = {}) const {
    return max_rhs_mismatch <= tol.eh_limit && max_hamiltonian_mismatch <= tol.eh_limit;
  }
};

/// eh_rhs against the chain-rule image of rhs_reduced for parameters (t3 + gamma^2, t3 + gamma^2, t3).
inline EHLimitReport verify_eh_limit(double gamma2, double t3, int n_states, std::uint64_t seed) {
  require_gamma2(gamma2);
  const MetricParams p = validate_params(t3 + gamma2, t3 + gamma2, t3);
  const EHLimit lim = eh_limit(p);
  EHLimitReport r;
  r.seed = seed;
  r.n_states = n_states;
  r.gamma2 = gamma2;
  StateSampler sampler(p, seed);
  for (int n = 0; n < n_states; ++n) {
    const ReducedState s = sampler.reduced();
    const EHState e = eh_from_reduced(s, lim);
    const EHState expected = eh_velocity_from_reduced(s, rhs_reduced(s, p), lim);
    const EHState got = eh_rhs(e, lim.gamma2);
    const auto a = got.array(), b = expected.array();
    for (int i = 0; i < 5; ++i)
      r.max_rhs_mismatch = std::max(r.max_rhs_mismatch, std::abs(a[i] - b[i]) / std::max(1.0, std::abs(b[i])));
    const double h_red = reduced_hamiltonian(s, p);
    r.max_hamiltonian_mismatch = std::max(r.max_hamiltonian_mismatch,
                                          std::abs(eh_hamiltonian(e, lim.gamma2) - h_red) / std::max(1.0, h_red));
  }
  return r;
}

/// Random EH levels with e > 0 and m3 != 0.
inline EHLevels random_eh_levels(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  const double gamma2 = 0.2 + 4.8 * u01(rng);
  const double e = 0.05 + 4.95 * u01(rng);
  const double mu2 = 10.0 * u01(rng);
  const double magnitude = 0.05 + 2.95 * u01(rng);
  const double m3 = u01(rng) < 0.5 ? -magnitude : magnitude;
  return make_eh_levels(e, m3, mu2, gamma2);
}

/// Discriminant of a x^3 + b x^2 + c x + d.
inline double cubic_discriminant(double a, double b, double c, double d) {
  return 18.0 * a * b * c * d - 4.0 * b * b * b * d + b * b * c * c - 4.0 * a * c * c * c - 27.0 * a * a * d * d;
}

struct EHRootReport {
  std::uint64_t seed = 0;
  int n_levels = 0;
  int interlacing_failures = 0;
  int nonpositive_discriminants = 0;
  double max_root_residual = 0;         // |R(rho_i)| / sum |c_k rho_i^k|
  double max_discriminant_mismatch = 0; // closed form against the generic cubic discriminant
  double min_k2 = 1;
  double max_k2 = 0;

  bool passed() const {
    return interlacing_failures == 0 && nonpositive_discriminants == 0 && max_root_residual <= 1e-12 &&
           max_discriminant_mismatch <= 1e-10 && min_k2 > 0.0 && max_k2 < 1.0;
  }
};

inline EHRootReport verify_eh_roots(int n_levels, std::uint64_t seed) {
  EHRootReport r;
  r.seed = seed;
  r.n_levels = n_levels;
  std::mt19937_64 rng(seed);
  for (int n = 0; n < n_levels; ++n) {
    const EHLevels lv = random_eh_levels(rng);
    const double disc = eh_discriminant(lv);
    if (!(disc > 0.0)) {
      ++r.nonpositive_discriminants;
      continue;
    }
    const auto c = r_cubic_coefficients(lv);
    const double generic = cubic_discriminant(c[0], c[1], c[2], c[3]);
    r.max_discriminant_mismatch = std::max(r.max_discriminant_mismatch, std::abs(disc - generic) / std::abs(disc));

    const auto roots = eh_roots(lv);
    const double g = lv.gamma();
    if (!(-g < roots[0] && roots[0] < 0.0 && 0.0 < roots[1] && roots[1] < g && g < roots[2]))
      ++r.interlacing_failures;
    for (double x : roots) {
      const double scale = std::abs(c[0] * x * x * x) + std::abs(c[1] * x * x) + std::abs(c[2] * x) + std::abs(c[3]);
      r.max_root_residual = std::max(r.max_root_residual, std::abs(r_cubic(lv, x)) / scale);
    }
    const double k2 = (roots[1] - roots[0]) / (roots[2] - roots[0]);
    r.min_k2 = std::min(r.min_k2, k2);
    r.max_k2 = std::max(r.max_k2, k2);
  }
  return r;
}

struct EHTauReport {
  std::uint64_t seed = 0;
  int n_pairs = 0;
  double max_rel_error_closed = 0;
  int n_degenerate = 0;
  double max_rel_error_degenerate = 0;

  bool passed(const VerifyTolerances& tol = {}) const {
    return max_rel_error_closed <= tol.eh_tau && max_rel_error_degenerate <= tol.eh_tau;
  }
};

/// Closed-form tau differences against quadrature on random intervals in
/// (rho3, rho3 + 10), and the logarithmic form on (gamma, gamma + 10).
inline EHTauReport verify_eh_tau(int n_pairs, int n_degenerate, std::uint64_t seed) {
  EHTauReport r;
  r.seed = seed;
  r.n_pairs = n_pairs;
  r.n_degenerate = n_degenerate;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  for (int n = 0; n < n_pairs; ++n) {
    const EHLevels lv = with_roots(random_eh_levels(rng));
    const double rho3 = lv.roots[2];
    double a = rho3 + 10.0 * u01(rng), b = rho3 + 10.0 * u01(rng);
    while (std::abs(a - b) < 0.1) b = rho3 + 10.0 * u01(rng);
    const double closed = eh_tau_closed(lv, b) - eh_tau_closed(lv, a);
    const double quad = eh_tau_quadrature(lv, a, b).value;
    r.max_rel_error_closed = std::max(r.max_rel_error_closed, std::abs(closed - quad) / std::abs(quad));
  }
  for (int n = 0; n < n_degenerate; ++n) {
    const double gamma2 = 0.2 + 4.8 * u01(rng);
    const double e = 0.05 + 4.95 * u01(rng);
    const EHLevels lv = make_eh_levels(e, 0.0, 2.0 * e * std::sqrt(gamma2), gamma2);
    const double g = lv.gamma();
    double a = g + 0.05 + 10.0 * u01(rng), b = g + 0.05 + 10.0 * u01(rng);
    while (std::abs(a - b) < 0.1) b = g + 0.05 + 10.0 * u01(rng);
    const double closed = eh_tau_degenerate(lv, b) - eh_tau_degenerate(lv, a);
    const double quad = eh_tau_quadrature(lv, a, b).value;
    r.max_rel_error_degenerate = std::max(r.max_rel_error_degenerate, std::abs(closed - quad) / std::abs(quad));
  }
  return r;
}

}  // namespace bgpp
