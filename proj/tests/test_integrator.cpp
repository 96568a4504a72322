#include <gtest/gtest.h>

#include <cmath>

#include "bgpp/integrator.hpp"
#include "bgpp/verify.hpp"

using namespace bgpp;

namespace {

template <class F>
void expect_error(ErrorKind kind, F&& f) {
  try {
    f();
    FAIL() << "expected " << to_string(kind);
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), kind) << e.what();
  }
}

const MetricParams kParams = validate_params(0, 1, 2);
const MixedState kState{5.0, 0.3, 0.5, -0.3, 0.8, 0.2, 1.0, 0.7};

double max_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::abs(a[i] - b[i]));
  return worst;
}

/// Classical RK4 on the full flow with a fixed step, as an independent reference.
std::array<double, 8> rk4_full(const MetricParams& p, MixedState s, double span, int steps) {
  const double h = span / steps;
  using V = Vector8;
  const auto f = [&](const V& y) { return rhs_full(MixedState::from(y), p).vector(); };
  V y = s.vector();
  for (int i = 0; i < steps; ++i) {
    const V k1 = f(y), k2 = f(y + 0.5 * h * k1), k3 = f(y + 0.5 * h * k2), k4 = f(y + h * k3);
    y += h / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4);
  }
  return MixedState::from(y).array();
}

}  // namespace

TEST(Integrator, ZeroMomentaStayPut) {
  const ReducedState s{3.0, 0.0, 0.0, 0.0, 0.0};
  const Trajectory traj = integrate(s, kParams, 0.0, 5.0);
  for (const Sample& smp : traj.samples)
    for (int i = 0; i < 5; ++i) EXPECT_EQ(smp.state[i], s.array()[i]);
  EXPECT_EQ(traj.back().lambda, 5.0);
}

TEST(Integrator, ZeroSpan) {
  const Trajectory traj = integrate(kState, kParams, 1.0, 1.0);
  ASSERT_EQ(traj.samples.size(), 1u);
  EXPECT_EQ(traj.samples[0].lambda, 1.0);
  EXPECT_EQ(traj.accepted_steps, 0);
}

TEST(Integrator, MatchesRungeKuttaReference) {
  const Trajectory traj = integrate(kState, kParams, 0.0, 2.0, {1e-13, 1e-14});
  const auto ref = rk4_full(kParams, kState, 2.0, 4000);
  EXPECT_LT(max_diff(traj.back().state, {ref.begin(), ref.end()}), 1e-10);
}

TEST(Integrator, FixedStepConvergenceOrder) {
  IntegratorConfig reference_cfg;
  reference_cfg.rel_tol = 1e-14;
  reference_cfg.abs_tol = 1e-15;
  const auto reference = integrate(kState, kParams, 0.0, 2.0, reference_cfg).back().state;
  std::vector<double> errors;
  for (double h : {0.4, 0.2, 0.1}) {
    IntegratorConfig cfg;
    cfg.fixed_step = h;
    const Trajectory traj = integrate(kState, kParams, 0.0, 2.0, cfg);
    EXPECT_EQ(traj.accepted_steps, std::lround(2.0 / h));
    errors.push_back(max_diff(traj.back().state, reference));
  }
  EXPECT_GE(std::log2(errors[0] / errors[1]), 4.5) << errors[0] << " " << errors[1];
  EXPECT_GE(std::log2(errors[1] / errors[2]), 4.5) << errors[1] << " " << errors[2];
}

TEST(Integrator, ConservesFirstIntegrals) {
  const Trajectory traj = integrate(kState, kParams, 0.0, 20.0);
  EXPECT_LE(traj.max_drift(), 1e-8);
  ASSERT_EQ(traj.drift_report.size(), 4u);
  EXPECT_EQ(traj.drift_report[0].name, "H");
  const ConservationReport r = verify_conservation(validate_params(0.4, 2.2, 1.3), 10, 51, 10.0);
  EXPECT_TRUE(r.passed()) << r.max_drift_full << " " << r.max_drift_reduced << " " << r.max_radial_residual;
}

TEST(Integrator, Reversible) {
  const Trajectory fwd = integrate(kState, kParams, 0.0, 5.0);
  const MixedState end = MixedState::from(Vector8(Eigen::Map<const Vector8>(fwd.back().state.data())));
  const Trajectory back = integrate(end, kParams, 5.0, 0.0);
  EXPECT_EQ(back.back().lambda, 0.0);
  EXPECT_GT(back.samples.front().lambda, back.samples.back().lambda);
  const auto start = kState.array();
  EXPECT_LT(max_diff(back.back().state, {start.begin(), start.end()}), 1e-8);
}

TEST(Integrator, StrideGrid) {
  IntegratorConfig cfg;
  cfg.sample_stride = 0.25;
  const Trajectory traj = integrate(kState, kParams, 0.0, 3.1, cfg);
  ASSERT_EQ(traj.samples.size(), 14u);
  for (std::size_t i = 0; i + 1 < traj.samples.size(); ++i)
    EXPECT_DOUBLE_EQ(traj.samples[i].lambda, 0.25 * static_cast<double>(i));
  EXPECT_EQ(traj.back().lambda, 3.1);
}

TEST(Integrator, Failures) {
  IntegratorConfig cfg;
  cfg.max_steps = 3;
  expect_error(ErrorKind::StepFailure, [&] { integrate(kState, kParams, 0.0, 50.0, cfg); });

  // Falling straight into t = t_max: adaptive steps underflow at the wall.
  const ReducedState fall{2.5, -3.0, 0.0, 0.0, 0.0};
  expect_error(ErrorKind::StepFailure, [&] { integrate(fall, kParams, 0.0, 50.0); });
  // A fixed step large enough to jump past the wall.
  IntegratorConfig jump;
  jump.fixed_step = 0.5;
  expect_error(ErrorKind::DomainExit, [&] { integrate(fall, kParams, 0.0, 5.0, jump); });

  expect_error(ErrorKind::DomainError, [&] { integrate(ReducedState{1.0, 0, 1, 0, 0}, kParams, 0.0, 1.0); });
  expect_error(ErrorKind::NonFinite, [&] { integrate(kState, kParams, 0.0, std::nan("")); });

  IntegratorConfig bad;
  bad.rel_tol = 0.0;
  expect_error(ErrorKind::DomainError, [&] { integrate(kState, kParams, 0.0, 1.0, bad); });
  bad = {};
  bad.sample_stride = -1.0;
  expect_error(ErrorKind::DomainError, [&] { integrate(kState, kParams, 0.0, 1.0, bad); });
}

TEST(Integrator, EHFlowInvariants) {
  const double g2 = 1.0;
  const EHState s{2.0, -0.5, 0.6, 0.4, 0.7};
  IntegratorConfig cfg;
  const Trajectory traj = integrate(s, g2, 0.0, 10.0, cfg);
  const EHLevels lv = eh_levels_from_state(s, g2);
  for (const Sample& smp : traj.samples) {
    const EHState x = EHState::from(std::array<double, 5>{smp.state[0], smp.state[1], smp.state[2], smp.state[3],
                                                          smp.state[4]});
    EXPECT_LE(std::abs(x.M1 * x.M1 + x.M2 * x.M2 - lv.mu2), 100.0 * cfg.rel_tol * lv.mu2);
    EXPECT_EQ(x.M3, s.M3);
    const double rho_dot = eh_rhs(x, g2).rho;
    EXPECT_LE(std::abs(rho_dot * rho_dot - r_cubic(lv, x.rho) / (x.rho * x.rho)), 1e-9);
  }
  EXPECT_LE(traj.max_drift(), 1e-8);
}
