#pragma once

// Jacobi elliptic functions, incomplete elliptic integrals of the first and
// third kind via Carlson's symmetric forms, and a globally adaptive
// Gauss-Kronrod quadrature with square-root endpoint substitution.

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <queue>
#include <string>
#include <vector>

#include "bgpp/errors.hpp"

namespace bgpp {

struct EllipticModulus {
  double k = 0;
  double k2 = 0;

  static EllipticModulus from_k2(double k2) {
    if (!(k2 >= 0.0 && k2 <= 1.0))
      throw Error(ErrorKind::ModulusOutOfRange, "k^2 = " + std::to_string(k2) + " outside [0, 1]");
    return {std::sqrt(k2), k2};
  }
};

namespace carlson {

// Duplication algorithms; tolerances give relative errors below 1e-16.

inline double rc(double x, double y) {
  constexpr double errtol = 0.0012;
  constexpr double c1 = 0.3, c2 = 1.0 / 7.0, c3 = 0.375, c4 = 9.0 / 22.0;
  if (!(x >= 0.0) || !(y > 0.0)) throw Error(ErrorKind::DomainError, "R_C needs x >= 0, y > 0");
  double ave = 0, s = 0;
  for (int it = 0; it < 200; ++it) {
    const double lambda = 2.0 * std::sqrt(x) * std::sqrt(y) + y;
    x = 0.25 * (x + lambda);
    y = 0.25 * (y + lambda);
    ave = (x + y + y) / 3.0;
    s = (y - ave) / ave;
    if (std::abs(s) <= errtol) break;
  }
  return (1.0 + s * s * (c1 + s * (c2 + s * (c3 + s * c4)))) / std::sqrt(ave);
}

inline double rf(double x, double y, double z) {
  constexpr double errtol = 0.0025;
  constexpr double c1 = 1.0 / 24.0, c2 = 0.1, c3 = 3.0 / 44.0, c4 = 1.0 / 14.0;
  if (std::min({x, y, z}) < 0.0 || std::min({x + y, x + z, y + z}) <= 0.0)
    throw Error(ErrorKind::DomainError, "R_F needs non-negative arguments, at most one zero");
  double ave = 0, dx = 0, dy = 0, dz = 0;
  for (int it = 0; it < 200; ++it) {
    const double sx = std::sqrt(x), sy = std::sqrt(y), sz = std::sqrt(z);
    const double lambda = sx * (sy + sz) + sy * sz;
    x = 0.25 * (x + lambda);
    y = 0.25 * (y + lambda);
    z = 0.25 * (z + lambda);
    ave = (x + y + z) / 3.0;
    dx = (ave - x) / ave;
    dy = (ave - y) / ave;
    dz = (ave - z) / ave;
    if (std::max({std::abs(dx), std::abs(dy), std::abs(dz)}) <= errtol) break;
  }
  const double e2 = dx * dy - dz * dz;
  const double e3 = dx * dy * dz;
  return (1.0 + (c1 * e2 - c2 - c3 * e3) * e2 + c4 * e3) / std::sqrt(ave);
}

/// R_J for p > 0 (no Cauchy principal value).
inline double rj(double x, double y, double z, double p) {
  constexpr double errtol = 0.0015;
  constexpr double c1 = 3.0 / 14.0, c2 = 1.0 / 3.0, c3 = 3.0 / 22.0, c4 = 3.0 / 26.0;
  constexpr double c5 = 0.75 * c1, c6 = 1.5 * c4, c7 = 0.5 * c2, c8 = c3 + c3;
  if (std::min({x, y, z}) < 0.0 || std::min({x + y, x + z, y + z}) <= 0.0 || !(p > 0.0))
    throw Error(ErrorKind::DomainError, "R_J needs non-negative x, y, z (at most one zero) and p > 0");
  double sum = 0.0, fac = 1.0;
  double ave = 0, dx = 0, dy = 0, dz = 0, dp = 0;
  for (int it = 0; it < 200; ++it) {
    const double sx = std::sqrt(x), sy = std::sqrt(y), sz = std::sqrt(z);
    const double lambda = sx * (sy + sz) + sy * sz;
    const double alpha = std::pow(p * (sx + sy + sz) + sx * sy * sz, 2);
    const double beta = p * std::pow(p + lambda, 2);
    sum += fac * rc(alpha, beta);
    fac *= 0.25;
    x = 0.25 * (x + lambda);
    y = 0.25 * (y + lambda);
    z = 0.25 * (z + lambda);
    p = 0.25 * (p + lambda);
    ave = 0.2 * (x + y + z + p + p);
    dx = (ave - x) / ave;
    dy = (ave - y) / ave;
    dz = (ave - z) / ave;
    dp = (ave - p) / ave;
    if (std::max({std::abs(dx), std::abs(dy), std::abs(dz), std::abs(dp)}) <= errtol) break;
  }
  const double ea = dx * (dy + dz) + dy * dz;
  const double eb = dx * dy * dz;
  const double ec = dp * dp;
  const double ed = ea - 3.0 * ec;
  const double ee = eb + 2.0 * dp * (ea - ec);
  return 3.0 * sum + fac *
                         (1.0 + ed * (-c1 + c5 * ed - c6 * ee) + eb * (c7 + dp * (-c8 + dp * c4)) +
                          dp * ea * (c2 - dp * c3) - c2 * dp * ec) /
                         (ave * std::sqrt(ave));
}

}  // namespace carlson

inline void require_modulus(double k2) {
  if (!(k2 >= 0.0 && k2 <= 1.0))
    throw Error(ErrorKind::ModulusOutOfRange, "k^2 = " + std::to_string(k2) + " outside [0, 1]");
}

/// Complete integral of the first kind K(k).
inline double elliptic_K(double k2) {
  require_modulus(k2);
  if (k2 == 1.0) return std::numeric_limits<double>::infinity();
  return carlson::rf(0.0, 1.0 - k2, 1.0);
}

/// Complete integral of the third kind Pi(n, k), n < 1.
inline double elliptic_Pi_complete(double n, double k2) {
  require_modulus(k2);
  if (!(n < 1.0)) throw Error(ErrorKind::CharacteristicPole, "complete Pi needs n < 1");
  if (k2 == 1.0) return std::numeric_limits<double>::infinity();
  return carlson::rf(0.0, 1.0 - k2, 1.0) + n / 3.0 * carlson::rj(0.0, 1.0 - k2, 1.0, 1.0 - n);
}

namespace detail {

// phi = j*pi + r with r in [-pi/2, pi/2].
inline std::pair<double, double> split_half_periods(double phi) {
  const double j = std::nearbyint(phi / std::numbers::pi);
  return {j, phi - j * std::numbers::pi};
}

}  // namespace detail

/// F(phi, k) = int_0^phi dtheta / sqrt(1 - k^2 sin^2 theta), any real phi.
inline double elliptic_F(double phi, double k2) {
  require_modulus(k2);
  if (!std::isfinite(phi)) throw Error(ErrorKind::NonFinite, "elliptic_F: phi not finite");
  const auto [j, r] = detail::split_half_periods(phi);
  const double s = std::sin(r), c = std::cos(r);
  if (k2 * s * s >= 1.0 || (j != 0.0 && k2 == 1.0))
    throw Error(ErrorKind::ModulusOutOfRange, "elliptic_F: k^2 sin^2(phi) reaches 1");
  if (s == 0.0) return j == 0.0 ? 0.0 : 2.0 * j * elliptic_K(k2);
  const double partial = s * carlson::rf(c * c, 1.0 - k2 * s * s, 1.0);
  return j == 0.0 ? partial : 2.0 * j * elliptic_K(k2) + partial;
}

/// Pi(phi, n, k) = int_0^phi dtheta / ((1 - n sin^2 theta) sqrt(1 - k^2 sin^2 theta)).
inline double elliptic_Pi(double phi, double n, double k2) {
  require_modulus(k2);
  if (!std::isfinite(phi) || !std::isfinite(n)) throw Error(ErrorKind::NonFinite, "elliptic_Pi: non-finite input");
  const auto [j, r] = detail::split_half_periods(phi);
  const double s = std::sin(r), c = std::cos(r);
  // Largest n sin^2 on the path [0, |phi|].
  const double s_max2 = (j != 0.0) ? 1.0 : s * s;
  if (n * s_max2 >= 1.0)
    throw Error(ErrorKind::CharacteristicPole, "elliptic_Pi: 1 - n sin^2 vanishes on the path");
  if (k2 * s_max2 >= 1.0)
    throw Error(ErrorKind::ModulusOutOfRange, "elliptic_Pi: k^2 sin^2(phi) reaches 1");
  double partial = 0.0;
  if (s != 0.0) {
    const double s2 = s * s;
    partial = s * carlson::rf(c * c, 1.0 - k2 * s2, 1.0) +
              n / 3.0 * s * s2 * carlson::rj(c * c, 1.0 - k2 * s2, 1.0, 1.0 - n * s2);
  }
  return j == 0.0 ? partial : 2.0 * j * elliptic_Pi_complete(n, k2) + partial;
}

struct JacobiTriple {
  double sn = 0, cn = 1, dn = 1;
};

/// sn, cn, dn by descending Landen (AGM) transformation; k^2 = 1 uses the
/// hyperbolic closed form.
inline JacobiTriple jacobi_sn_cn_dn(double u, double k2) {
  require_modulus(k2);
  if (!std::isfinite(u)) {
    if (k2 == 1.0 && std::isinf(u)) return {u > 0 ? 1.0 : -1.0, 0.0, 0.0};
    throw Error(ErrorKind::NonFinite, "jacobi_sn_cn_dn: u not finite");
  }
  if (k2 == 0.0) return {std::sin(u), std::cos(u), 1.0};
  if (k2 == 1.0) {
    const double sech = 1.0 / std::cosh(u);
    return {std::tanh(u), sech, sech};
  }

  constexpr int max_levels = 16;
  std::array<double, max_levels + 1> a{}, c{};
  a[0] = 1.0;
  double b = std::sqrt(1.0 - k2);
  c[0] = std::sqrt(k2);
  int n = 0;
  while (n < max_levels && std::abs(c[n]) > std::numeric_limits<double>::epsilon() * a[n]) {
    a[n + 1] = 0.5 * (a[n] + b);
    c[n + 1] = 0.5 * (a[n] - b);
    b = std::sqrt(a[n] * b);
    ++n;
  }
  double phi = std::ldexp(a[n] * u, n);
  for (int i = n; i > 0; --i) phi = 0.5 * (phi + std::asin(c[i] / a[i] * std::sin(phi)));
  JacobiTriple out;
  out.sn = std::sin(phi);
  out.cn = std::cos(phi);
  // (1 - k^2) + k^2 cn^2 avoids cancellation near sn = 1.
  out.dn = std::sqrt((1.0 - k2) + k2 * out.cn * out.cn);
  return out;
}

// ---------------------------------------------------------------------------
// Quadrature

struct QuadResult {
  double value = 0;
  double error = 0;
};

struct QuadOptions {
  double abs_tol = 1e-13;
  double rel_tol = 1e-13;
  int max_subdivisions = 4000;
};

namespace detail {

// 15-point Kronrod rule with its embedded 7-point Gauss rule.
inline constexpr std::array<double, 8> kKronrodNodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kKronrodWeights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> kGaussWeights = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Segment {
  double a, b, value, error;
  bool operator<(const Segment& other) const { return error < other.error; }
};

template <class F>
Segment gauss_kronrod_15(const F& f, double a, double b) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double f_center = f(center);
  double kronrod = f_center * kKronrodWeights[7];
  double gauss = f_center * kGaussWeights[3];
  double abs_sum = std::abs(kronrod);
  std::array<double, 7> f_left{}, f_right{};
  for (int j = 0; j < 7; ++j) {
    const double dx = half * kKronrodNodes[j];
    f_left[j] = f(center - dx);
    f_right[j] = f(center + dx);
    const double pair = f_left[j] + f_right[j];
    kronrod += kKronrodWeights[j] * pair;
    abs_sum += kKronrodWeights[j] * (std::abs(f_left[j]) + std::abs(f_right[j]));
    if (j % 2 == 1) gauss += kGaussWeights[j / 2] * pair;
  }
  const double mean = 0.5 * kronrod;
  double asc = kKronrodWeights[7] * std::abs(f_center - mean);
  for (int j = 0; j < 7; ++j)
    asc += kKronrodWeights[j] * (std::abs(f_left[j] - mean) + std::abs(f_right[j] - mean));

  const double value = kronrod * half;
  abs_sum *= std::abs(half);
  asc *= std::abs(half);
  double err = std::abs((kronrod - gauss) * half);
  if (asc != 0.0 && err != 0.0) err = asc * std::min(1.0, std::pow(200.0 * err / asc, 1.5));
  constexpr double eps = std::numeric_limits<double>::epsilon();
  if (abs_sum > std::numeric_limits<double>::min() / (50.0 * eps)) err = std::max(50.0 * eps * abs_sum, err);
  return {a, b, value, err};
}

}  // namespace detail

/// Globally adaptive G7-K15 quadrature of a smooth integrand on [a, b].
template <class F>
QuadResult adaptive_quad(const F& f, double a, double b, const QuadOptions& opt = {}) {
  if (a == b) return {0.0, 0.0};
  if (!std::isfinite(a) || !std::isfinite(b)) throw Error(ErrorKind::NonFinite, "quadrature bounds not finite");
  const double sign = b > a ? 1.0 : -1.0;
  if (b < a) std::swap(a, b);

  std::priority_queue<detail::Segment> heap;
  detail::Segment first = detail::gauss_kronrod_15(f, a, b);
  double total = first.value, total_err = first.error;
  heap.push(first);
  int subdivisions = 0;
  while (total_err > std::max(opt.abs_tol, opt.rel_tol * std::abs(total))) {
    if (!std::isfinite(total)) throw Error(ErrorKind::NoConvergence, "integrand produced a non-finite value");
    if (subdivisions >= opt.max_subdivisions)
      throw Error(ErrorKind::NoConvergence, "quadrature error estimate " + std::to_string(total_err) +
                                                " above tolerance after max subdivisions");
    const detail::Segment worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b))
      throw Error(ErrorKind::NoConvergence, "quadrature interval cannot be bisected further");
    const detail::Segment left = detail::gauss_kronrod_15(f, worst.a, mid);
    const detail::Segment right = detail::gauss_kronrod_15(f, mid, worst.b);
    total += left.value + right.value - worst.value;
    total_err += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
    ++subdivisions;
  }
  // Re-sum to shed accumulated update round-off.
  total = 0.0;
  total_err = 0.0;
  while (!heap.empty()) {
    total += heap.top().value;
    total_err += heap.top().error;
    heap.pop();
  }
  if (!std::isfinite(total)) throw Error(ErrorKind::NoConvergence, "integrand produced a non-finite value");
  return {sign * total, total_err};
}

enum class SingularEnd { None, Left, Right };

/// Integral of f over [a, b] where f may behave like (x - a)^(-1/2) at the
/// flagged end; x = a + s^2 (or x = b - s^2) removes the singularity.
template <class F>
QuadResult quad_sqrt_endpoint(const F& f, double a, double b, SingularEnd end, const QuadOptions& opt = {}) {
  if (a == b) return {0.0, 0.0};
  if (b < a) {
    const SingularEnd mirrored =
        end == SingularEnd::Left ? SingularEnd::Right : (end == SingularEnd::Right ? SingularEnd::Left : end);
    QuadResult r = quad_sqrt_endpoint(f, b, a, mirrored, opt);
    r.value = -r.value;
    return r;
  }
  const double width = std::sqrt(b - a);
  switch (end) {
    case SingularEnd::None:
      return adaptive_quad(f, a, b, opt);
    case SingularEnd::Left:
      return adaptive_quad([&](double s) { return 2.0 * s * f(a + s * s); }, 0.0, width, opt);
    case SingularEnd::Right:
      return adaptive_quad([&](double s) { return 2.0 * s * f(b - s * s); }, 0.0, width, opt);
  }
  return {};
}

/// Both ends desingularized: split at the midpoint.
template <class F>
QuadResult quad_sqrt_both_ends(const F& f, double a, double b, const QuadOptions& opt = {}) {
  const double mid = 0.5 * (a + b);
  const QuadResult left = quad_sqrt_endpoint(f, a, mid, SingularEnd::Left, opt);
  const QuadResult right = quad_sqrt_endpoint(f, mid, b, SingularEnd::Right, opt);
  return {left.value + right.value, left.error + right.error};
}

}  // namespace bgpp
