#include <gtest/gtest.h>

#include <array>
#include <cmath>
#include <functional>
#include <numbers>
#include <random>

#include "bgpp/full_flow.hpp"
#include "bgpp/verify.hpp"

using namespace bgpp;

namespace {

constexpr double pi = std::numbers::pi;

using Canon = std::array<double, 8>;  // (t, theta, phi, psi, P_t, P_theta, P_phi, P_psi)

CanonicalState canon_from(const Canon& c) { return {c[0], c[1], c[2], c[3], c[4], c[5], c[6], c[7]}; }
Canon canon_to(const CanonicalState& s) {
  return {s.t, s.theta, s.phi, s.psi, s.P_t, s.P_theta, s.P_phi, s.P_psi};
}

/// Central-difference derivative of a function of canonical coordinates.
double d_canon(const std::function<double(const Canon&)>& f, Canon c, int k, double h = 1e-6) {
  Canon up = c, dn = c;
  up[k] += h;
  dn[k] -= h;
  return (f(up) - f(dn)) / (up[k] - dn[k]);
}

/// Time derivative of `g` along the canonical flow of H, by finite differences.
double canonical_rate(const std::function<double(const Canon&)>& g, const std::function<double(const Canon&)>& H,
                      const Canon& c) {
  double sum = 0.0;
  for (int k = 0; k < 4; ++k) sum += d_canon(g, c, k) * d_canon(H, c, k + 4) - d_canon(g, c, k + 4) * d_canon(H, c, k);
  return sum;
}

}  // namespace

TEST(ToMixed, OnlyPsiMomentum) {
  const MixedState m = to_mixed({1.0, pi / 2, 0.0, 0.0, 0.0, 0.0, 0.0, 5.0});
  EXPECT_NEAR(m.M1, 0.0, 1e-15);
  EXPECT_NEAR(m.M2, 0.0, 1e-15);
  EXPECT_EQ(m.M3, 5.0);
}

TEST(ToMixed, GenericMomenta) {
  const MixedState m = to_mixed({1.0, pi / 2, 0.0, 0.0, 0.0, 1.0, 2.0, 3.0});
  EXPECT_NEAR(m.M1, 2.0, 1e-15);
  EXPECT_NEAR(m.M2, 1.0, 1e-15);
  EXPECT_EQ(m.M3, 3.0);
}

TEST(ToMixed, SingularAngles) {
  EXPECT_THROW(to_mixed({1.0, 0.0, 0.0, 0.0, 0.0, 1.0, 2.0, 3.0}), Error);
  MixedState m;
  m.theta = pi;
  EXPECT_THROW(from_mixed(m), Error);
}

TEST(FromMixed, InverseAndRoundTrip) {
  MixedState m;
  m.t = 3;
  m.M3 = 5;
  m.theta = pi / 2;
  const CanonicalState c = from_mixed(m);
  EXPECT_NEAR(c.P_theta, 0.0, 1e-15);
  EXPECT_NEAR(c.P_phi, 0.0, 1e-15);
  EXPECT_EQ(c.P_psi, 5.0);

  const MetricParams p = validate_params(0, 1, 2);
  StateSampler sampler(p, 11);
  for (int i = 0; i < 100; ++i) {
    const MixedState s = sampler.full();
    const MixedState back = to_mixed(from_mixed(s));
    EXPECT_LT((back.vector() - s.vector()).cwiseAbs().maxCoeff(), 1e-13);
    const IntegralValues v = integrals(s, p);
    EXPECT_NEAR(from_mixed(s).P_phi, v.P_phi, 1e-14 * std::max(1.0, std::abs(v.P_phi)));
  }
}

TEST(Hamiltonian, Values) {
  const MetricParams iso = validate_params(0, 0, 0);
  MixedState s;
  s.t = 1;
  s.theta = 1;
  EXPECT_EQ(hamiltonian(s, iso), 0.0);
  s.P_t = 1;
  s.M1 = 1;
  EXPECT_NEAR(hamiltonian(s, iso), 2.5, 1e-15);
}

TEST(Hamiltonian, CanonicalFormAgrees) {
  const MetricParams p = validate_params(0.4, 1.3, 2.2);
  StateSampler sampler(p, 5);
  for (int i = 0; i < 100; ++i) {
    const MixedState s = sampler.full();
    const double h = hamiltonian(s, p);
    EXPECT_GE(h, 0.0);
    EXPECT_NEAR(canonical_hamiltonian(from_mixed(s), p), h, 1e-12 * h);
  }
}

TEST(PoissonTensor, StructureAndAntisymmetry) {
  MixedState s;
  s.theta = 0.9;
  s.psi = 0.4;
  Matrix8 J = poisson_tensor(s);
  EXPECT_EQ((J.block<3, 3>(2, 2).cwiseAbs().maxCoeff()), 0.0);
  EXPECT_EQ(J(0, 1), 1.0);
  EXPECT_EQ(J(1, 0), -1.0);

  const MetricParams p = validate_params(0, 1, 2);
  StateSampler sampler(p, 3);
  for (int i = 0; i < 50; ++i) {
    J = poisson_tensor(sampler.full());
    EXPECT_EQ((J + J.transpose()).cwiseAbs().maxCoeff(), 0.0);
    EXPECT_EQ((J.block<3, 3>(5, 5).cwiseAbs().maxCoeff()), 0.0);
  }
}

TEST(PoissonTensor, MomentumAlgebra) {
  const MetricParams p = validate_params(0, 1, 2);
  StateSampler sampler(p, 8);
  const ScalarField m1 = [](const MixedState& x) { return x.M1; };
  const ScalarField m2 = [](const MixedState& x) { return x.M2; };
  const ScalarField m3 = [](const MixedState& x) { return x.M3; };
  for (int i = 0; i < 50; ++i) {
    const MixedState s = sampler.full();
    EXPECT_NEAR(bracket(m1, m2, s), s.M3, 1e-10);
    EXPECT_NEAR(bracket(m2, m3, s), s.M1, 1e-10);
    EXPECT_NEAR(bracket(m3, m1, s), s.M2, 1e-10);
  }
}

TEST(PoissonTensor, JacobiIdentity) {
  const MetricParams p = validate_params(0, 1, 2);
  StateSampler sampler(p, 21);
  for (int i = 0; i < 30; ++i) {
    const MixedState s = sampler.full();
    EXPECT_LT(jacobi_residual(s), 1e-9);
    EXPECT_LT(jacobi_residual_exact(s), 1e-12);
  }
}

TEST(PoissonTensor, ExactDerivativeMatchesDifferences) {
  MixedState s;
  s.t = 3;
  s.M1 = 0.3;
  s.M2 = -1.2;
  s.M3 = 0.8;
  s.theta = 0.7;
  s.psi = 2.1;
  for (int l = 0; l < 8; ++l) {
    Vector8 up = s.vector(), dn = s.vector();
    up[l] += 1e-6;
    dn[l] -= 1e-6;
    const Matrix8 fd =
        (poisson_tensor(MixedState::from(up)) - poisson_tensor(MixedState::from(dn))) / (up[l] - dn[l]);
    EXPECT_LT((fd - poisson_tensor_derivative(s, l)).cwiseAbs().maxCoeff(), 1e-8) << "coordinate " << l;
  }
}

TEST(RhsFull, MatchesTensorTimesGradient) {
  const MetricParams p = validate_params(0.4, 1.3, 2.2);
  StateSampler sampler(p, 17);
  const ScalarField H = [&p](const MixedState& x) { return hamiltonian(x, p); };
  for (int i = 0; i < 100; ++i) {
    const MixedState s = sampler.full();
    const Vector8 rhs = rhs_full(s, p).vector();
    const Vector8 exact = poisson_tensor(s) * hamiltonian_gradient(s, p);
    const Vector8 numeric = poisson_tensor(s) * numeric_gradient(H, s);
    for (int k = 0; k < 8; ++k) {
      EXPECT_NEAR(rhs[k], exact[k], 1e-12 * std::max(1.0, std::abs(rhs[k])));
      EXPECT_NEAR(rhs[k], numeric[k], 1e-6 * std::max(1.0, std::abs(rhs[k])));
    }
  }
}

TEST(RhsFull, MatchesCanonicalHamiltonEquations) {
  // Independent oracle: Hamilton's equations in the canonical chart, pushed
  // through the momentum map by finite differences.
  const MetricParams p = validate_params(0.4, 1.3, 2.2);
  StateSampler sampler(p, 23);
  const auto H = [&p](const Canon& c) { return canonical_hamiltonian(canon_from(c), p); };
  const std::array<std::function<double(const Canon&)>, 8> coords = {
      [](const Canon& c) { return c[0]; },
      [](const Canon& c) { return c[4]; },
      [](const Canon& c) { return to_mixed(canon_from(c)).M1; },
      [](const Canon& c) { return to_mixed(canon_from(c)).M2; },
      [](const Canon& c) { return to_mixed(canon_from(c)).M3; },
      [](const Canon& c) { return c[2]; },
      [](const Canon& c) { return c[1]; },
      [](const Canon& c) { return c[3]; }};
  for (int i = 0; i < 20; ++i) {
    const MixedState s = sampler.full();
    const Canon c = canon_to(from_mixed(s));
    const Vector8 rhs = rhs_full(s, p).vector();
    for (int k = 0; k < 8; ++k)
      EXPECT_NEAR(rhs[k], canonical_rate(coords[k], H, c), 1e-6 * std::max(1.0, std::abs(rhs[k]))) << "k=" << k;
  }
}

TEST(RhsFull, SpecialStates) {
  const MetricParams p = validate_params(0, 1, 2);
  MixedState s;
  s.t = 3;
  s.P_t = 1;
  s.theta = 1.0;
  s.psi = 0.3;
  const MixedState d = rhs_full(s, p);
  EXPECT_EQ(d.M1, 0.0);
  EXPECT_EQ(d.M2, 0.0);
  EXPECT_EQ(d.M3, 0.0);
  EXPECT_NEAR(d.t, 1.0 / profile(p, 3.0).f2, 1e-14);
  EXPECT_EQ(d.phi, 0.0);
  EXPECT_EQ(d.theta, 0.0);
  EXPECT_EQ(d.psi, 0.0);

  const MetricParams iso = validate_params(1, 1, 1);
  StateSampler sampler(iso, 4);
  for (int i = 0; i < 20; ++i) {
    const MixedState r = rhs_full(sampler.full(), iso);
    EXPECT_EQ(r.M1, 0.0);
    EXPECT_EQ(r.M2, 0.0);
    EXPECT_EQ(r.M3, 0.0);
  }
}

TEST(Integrals, Values) {
  const MetricParams p = validate_params(1, 2, 3);
  MixedState s;
  s.t = 4;
  s.theta = pi / 2;
  s.M1 = 3;
  s.M2 = 4;
  s.M3 = 12;
  EXPECT_EQ(integrals(s, p).C, 169.0);
  s.M1 = s.M2 = s.M3 = 1;
  EXPECT_EQ(integrals(s, p).I, 6.0);
  s.M1 = 2;
  s.M2 = 0;
  s.M3 = 7;
  EXPECT_NEAR(integrals(s, p).P_phi, 2.0, 1e-15);
}

TEST(Bracket, AntisymmetricAndSelfZero) {
  const MetricParams p = validate_params(0, 1, 2);
  StateSampler sampler(p, 2);
  const MixedState s = sampler.full();
  const ScalarField f = [](const MixedState& x) { return x.M1 * std::cos(x.theta) + x.P_t * x.t; };
  const ScalarField g = [&p](const MixedState& x) { return hamiltonian(x, p); };
  EXPECT_EQ(bracket(f, f, s), 0.0);
  EXPECT_NEAR(bracket(f, g, s), -bracket(g, f, s), 1e-12);
}

TEST(Bracket, FirstIntegralsCommute) {
  const MetricParams p = validate_params(0.3, 2.0, 1.1);
  const BracketReport r = verify_bracket_suite(p, 100, 99);
  EXPECT_LE(r.full_bracket_max(), 1e-9);
  EXPECT_GT(r.full_rank_margin, 1e-8);
  EXPECT_LE(r.gradient_residual, 1e-6);
}
