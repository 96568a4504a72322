#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <numbers>

#include "bgpp/metric.hpp"

using namespace bgpp;

namespace {

constexpr double pi = std::numbers::pi;

template <class F>
void expect_error(ErrorKind kind, F&& f) {
  try {
    f();
    FAIL() << "expected " << to_string(kind);
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), kind) << e.what();
  }
}

}  // namespace

TEST(ValidateParams, ClassifiesCoincidences) {
  EXPECT_EQ(validate_params(0, 1, 2).degeneracy, Degeneracy::Generic);
  EXPECT_EQ(validate_params(1, 1, 5).degeneracy, Degeneracy::EH_II);
  EXPECT_EQ(validate_params(3, 3, 3).degeneracy, Degeneracy::Isotropic);
  EXPECT_EQ(validate_params(0, 2, 2).degeneracy, Degeneracy::EH_I);
  EXPECT_EQ(validate_params(2, 0, 2).degeneracy, Degeneracy::EqualOuter);
  EXPECT_EQ(validate_params(1, 1 + 1e-14, 5).degeneracy, Degeneracy::EH_II);
  EXPECT_EQ(validate_params(1, 1 + 1e-6, 5).degeneracy, Degeneracy::Generic);
}

TEST(ValidateParams, RecordsSortedOrder) {
  const MetricParams p = validate_params(2, 0, 1);
  EXPECT_EQ(p.sorted, (std::array<double, 3>{0, 1, 2}));
  EXPECT_EQ(p.order, (std::array<int, 3>{1, 2, 0}));
  EXPECT_EQ(p.order_parity(), 1);
  EXPECT_DOUBLE_EQ(p.t_max, 2.0);
  EXPECT_DOUBLE_EQ(p.t_min, 0.0);
  EXPECT_EQ(validate_params(1, 0, 2).order_parity(), -1);
  EXPECT_EQ(validate_params(0, 1, 2).order_parity(), 1);
  for (int i = 0; i < 3; ++i) EXPECT_EQ(p.sorted[i], p.t[p.order[i]]);
}

TEST(ValidateParams, RejectsBadInput) {
  expect_error(ErrorKind::NegativeParameter, [] { validate_params(-1, 0, 1); });
  expect_error(ErrorKind::NonFinite, [] { validate_params(std::nan(""), 0, 1); });
  expect_error(ErrorKind::NonFinite, [] { validate_params(0, std::numeric_limits<double>::infinity(), 1); });
}

TEST(Profile, IsotropicUnitPoint) {
  const MetricProfile m = profile(validate_params(0, 0, 0), 1.0);
  EXPECT_DOUBLE_EQ(m.A, 1.0);
  EXPECT_DOUBLE_EQ(m.B, 1.0);
  EXPECT_DOUBLE_EQ(m.C, 1.0);
  EXPECT_DOUBLE_EQ(m.a2, 1.0);
  EXPECT_DOUBLE_EQ(m.b2, 1.0);
  EXPECT_DOUBLE_EQ(m.c2, 1.0);
  EXPECT_DOUBLE_EQ(m.f2, 0.25);
}

TEST(Profile, GenericPoint) {
  const MetricProfile m = profile(validate_params(0, 1, 2), 3.0);
  EXPECT_NEAR(m.A, std::sqrt(3.0), 1e-15);
  EXPECT_NEAR(m.B, std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(m.C, 1.0, 1e-15);
  EXPECT_NEAR(m.a2, std::sqrt(2.0 / 3.0), 1e-15);
  EXPECT_NEAR(m.b2, std::sqrt(1.5), 1e-15);
  EXPECT_NEAR(m.c2, std::sqrt(6.0), 1e-15);
  EXPECT_NEAR(m.f2, 1.0 / (4.0 * std::sqrt(6.0)), 1e-15);
}

TEST(Profile, ProductIdentities) {
  const MetricParams p = validate_params(0.3, 1.7, 0.9);
  for (double t : {1.8, 2.5, 7.0, 40.0}) {
    const MetricProfile m = profile(p, t);
    // a^2 b^2 c^2 = ABC and 4 f^2 a^2 b^2 c^2 = 1.
    EXPECT_NEAR(m.a2 * m.b2 * m.c2, m.A * m.B * m.C, 1e-12 * m.A * m.B * m.C);
    EXPECT_NEAR(4.0 * m.f2 * m.a2 * m.b2 * m.c2, 1.0, 1e-13);
  }
}

TEST(Profile, DomainBoundary) {
  expect_error(ErrorKind::DomainError, [] { profile(validate_params(0, 1, 2), 2.0); });
  expect_error(ErrorKind::DomainError, [] { profile(validate_params(0, 1, 2), 1.5); });
  expect_error(ErrorKind::NonFinite, [] { profile(validate_params(0, 1, 2), std::nan("")); });
}

TEST(InverseProfile, SlopesMatchCentralDifferences) {
  const MetricParams p = validate_params(0.2, 1.1, 2.3);
  for (double t : {2.5, 3.7, 9.0}) {
    const InverseProfile ip = inverse_profile(p, t);
    const double h = 1e-5;
    const MetricProfile up = profile(p, t + h), dn = profile(p, t - h);
    const std::array<double, 4> vu = {1 / up.f2, 1 / up.a2, 1 / up.b2, 1 / up.c2};
    const std::array<double, 4> vd = {1 / dn.f2, 1 / dn.a2, 1 / dn.b2, 1 / dn.c2};
    const MetricProfile m = profile(p, t);
    const std::array<double, 4> v = {1 / m.f2, 1 / m.a2, 1 / m.b2, 1 / m.c2};
    for (int i = 0; i < 4; ++i) {
      EXPECT_NEAR(ip.value[i], v[i], 1e-13 * std::abs(v[i]));
      EXPECT_NEAR(ip.slope[i], (vu[i] - vd[i]) / (2 * h), 1e-7 * std::max(1.0, std::abs(ip.slope[i])));
    }
  }
}

TEST(MetricComponents, SymmetricPositiveDefinite) {
  const MetricParams p = validate_params(0, 1, 2);
  const Eigen::Matrix4d g = metric_components(p, 3.0, pi / 3, pi / 5);
  EXPECT_LT((g - g.transpose()).cwiseAbs().maxCoeff(), 1e-15);
  const Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d> es(g);
  EXPECT_GT(es.eigenvalues().minCoeff(), 0.0);
  // det g = f^2 a^2 b^2 c^2 sin^2(theta).
  const MetricProfile m = profile(p, 3.0);
  EXPECT_NEAR(g.determinant(), m.f2 * m.a2 * m.b2 * m.c2 * std::pow(std::sin(pi / 3), 2), 1e-13);
}

TEST(Multicentre, GenericPoint) {
  EXPECT_LT(multicentre_check(validate_params(0, 1, 2), 3.0, pi / 3, pi / 5, 1e-5), 1e-6);
}

TEST(Multicentre, IsotropicPoint) {
  const MetricParams p = validate_params(0, 0, 0);
  EXPECT_LT(multicentre_check(p, 2.0, pi / 2, 0.0, 1e-5), 1e-6);
  // V = 1/sqrt(t) when all parameters vanish.
  EXPECT_NEAR(multicentre_data(p, 2.0, 0.7, 0.4).V, 1.0 / std::sqrt(2.0), 1e-15);
}

TEST(Multicentre, SecondOrderConvergence) {
  const MetricParams p = validate_params(0.5, 1.5, 3.0);
  double previous = multicentre_check(p, 4.2, 1.1, 0.8, 2e-2);
  for (double h : {1e-2, 5e-3, 2.5e-3}) {
    const double current = multicentre_check(p, 4.2, 1.1, 0.8, h);
    EXPECT_GE(std::log2(previous / current), 1.8);
    previous = current;
  }
}

TEST(Multicentre, Errors) {
  const MetricParams p = validate_params(0, 1, 2);
  expect_error(ErrorKind::SingularPoint, [&] { multicentre_check(p, 3.0, 0.0, 0.3, 1e-5); });
  expect_error(ErrorKind::DomainError, [&] { multicentre_check(p, 2.0, 1.0, 0.3, 1e-5); });
  expect_error(ErrorKind::DomainError, [&] { multicentre_check(p, 2.001, 1.0, 0.3, 1e-2); });
}

TEST(EHLimit, RepeatedLargerPair) {
  // Repeated value above the distinct one, given as (t1, t2, t3) = (1, 1, 0).
  const EHLimit lim = eh_limit(validate_params(1, 1, 0));
  EXPECT_DOUBLE_EQ(lim.gamma2, 1.0);
  EXPECT_DOUBLE_EQ(lim.rho(4.0), 2.0);  // rho = sqrt(t)
  EXPECT_DOUBLE_EQ(lim.t_of_rho(3.0), 9.0);
  EXPECT_DOUBLE_EQ(eh_limit(validate_params(2, 2, 0)).gamma2, 2.0);
  EXPECT_DOUBLE_EQ(eh_limit(validate_params(3.5, 3.5, 1.0)).gamma2, 2.5);
}

TEST(EHLimit, RejectsOtherPatterns) {
  expect_error(ErrorKind::NotEHLimit, [] { eh_limit(validate_params(0, 1, 2)); });
  expect_error(ErrorKind::NotEHLimit, [] { eh_limit(validate_params(0, 2, 2)); });
  expect_error(ErrorKind::NotEHLimit, [] { eh_limit(validate_params(1, 1, 5)); });
  expect_error(ErrorKind::NotEHLimit, [] { eh_limit(validate_params(3, 3, 3)); });
}

TEST(EHLimit, RadialFormOfMetric) {
  // With t1 = t2 the metric reads rho drho^2/(rho^2 - g^2) + rho (s1^2 + s2^2) + (rho^2 - g^2)/rho s3^2.
  const MetricParams p = validate_params(2.5, 2.5, 0.5);
  const EHLimit lim = eh_limit(p);
  const double t = 4.0, rho = lim.rho(t), g2 = lim.gamma2;
  const MetricProfile m = profile(p, t);
  EXPECT_NEAR(m.a2, rho, 1e-14);
  EXPECT_NEAR(m.b2, rho, 1e-14);
  EXPECT_NEAR(m.c2, (rho * rho - g2) / rho, 1e-14);
  // dt = 2 rho drho, so f^2 dt^2 = 4 rho^2 f^2 drho^2.
  EXPECT_NEAR(4 * rho * rho * m.f2, rho / (rho * rho - g2), 1e-14);
}
