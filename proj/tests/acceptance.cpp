// Acceptance run: one PASS/FAIL line per criterion, exit status 0 iff all pass.

#include <chrono>
#include <cmath>
#include <functional>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>

#include "bgpp/bgpp.hpp"

using namespace bgpp;

namespace {

struct Outcome {
  bool passed = false;
  std::string detail;
};

std::string sci(double x) {
  std::ostringstream os;
  os << std::scientific << std::setprecision(2) << x;
  return os.str();
}

int failures = 0;

/// Runs a criterion, timing it against `budget_s` (0: no budget).
void criterion(int id, const std::string& name, double budget_s, const std::function<Outcome()>& body) {
  const auto start = std::chrono::steady_clock::now();
  Outcome out;
  try {
    out = body();
  } catch (const std::exception& e) {
    out = {false, std::string("exception: ") + e.what()};
  }
  const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  const bool in_time = budget_s <= 0.0 || elapsed < budget_s;
  const bool ok = out.passed && in_time;
  if (!ok) ++failures;
  std::cout << (ok ? "PASS" : "FAIL") << " [" << id << "] " << name << ": " << out.detail << ", "
            << std::fixed << std::setprecision(3) << elapsed << " s";
  if (budget_s > 0.0) std::cout << " (budget " << budget_s << " s)";
  std::cout << std::defaultfloat << std::endl;
}

}  // namespace

int main() {
  const MetricParams p = validate_params(0, 1, 2);
  const std::uint64_t seed = kDefaultSeed;
  const VerifyTolerances tol;

  criterion(1, "full-flow integrals commute and are independent", 5.0, [&] {
    const BracketReport r = verify_bracket_suite(p, 100, seed);
    return Outcome{r.full_bracket_max() <= 1e-9 && r.full_rank_margin > 1e-8,
                   "max bracket " + sci(r.full_bracket_max()) + ", rank margin " + sci(r.full_rank_margin)};
  });

  criterion(2, "reduced-flow integrals commute on the symplectic leaf", 2.0, [&] {
    const BracketReport r = verify_bracket_suite(p, 100, seed);
    const bool ok = r.reduced_bracket_max() <= 1e-9 && r.casimir_annihilation == 0.0 &&
                    r.reduced_tensor_rank_min == 4 && r.reduced_tensor_rank_max == 4;
    return Outcome{ok, "max bracket " + sci(r.reduced_bracket_max()) + ", Casimir annihilation " +
                           sci(r.casimir_annihilation) + ", tensor rank " + std::to_string(r.reduced_tensor_rank_min) +
                           ".." + std::to_string(r.reduced_tensor_rank_max)};
  });

  ConservationReport conservation;
  criterion(3, "first integrals conserved along full and reduced flows", 10.0, [&] {
    conservation = verify_conservation(p, 20, seed, 10.0);
    const bool ok = conservation.max_drift_full <= 1e-8 && conservation.max_drift_reduced <= 1e-8;
    return Outcome{ok, "max drift full " + sci(conservation.max_drift_full) + ", reduced " +
                           sci(conservation.max_drift_reduced)};
  });

  criterion(4, "separated radial equation tdot^2 = S(t)", 0.0, [&] {
    return Outcome{conservation.runs > 0 && conservation.max_radial_residual <= 1e-9,
                   "max relative residual " + sci(conservation.max_radial_residual)};
  });

  criterion(5, "closed-form Euler solutions match integrated flow (cases I, II, III)", 10.0, [&] {
    bool ok = true;
    std::string detail;
    for (EulerCaseId id : {EulerCaseId::I, EulerCaseId::II, EulerCaseId::III}) {
      const ReducedState s = representative_state(p, id);
      const AnalyticReport r = verify_analytic_vs_numeric(levels_from_state(s, p), p, s, 0.0, 10.0);
      ok = ok && r.case_id == id && r.max_abs_error <= 1e-6;
      detail += std::string(detail.empty() ? "" : ", ") + to_string(r.case_id) + " " + sci(r.max_abs_error);
    }
    return Outcome{ok, "max abs error " + detail};
  });

  criterion(6, "Jacobi identities and F, Pi against quadrature", 5.0, [&] {
    double identity = 0.0;
    for (int i = 0; i < 100; ++i) {
      const double k2 = i / 99.0;
      for (int j = 0; j < 100; ++j) {
        const double u = -10.0 + 20.0 * j / 99.0;
        const JacobiTriple t = jacobi_sn_cn_dn(u, k2);
        identity = std::max({identity, std::abs(t.sn * t.sn + t.cn * t.cn - 1.0),
                             std::abs(t.dn * t.dn + k2 * t.sn * t.sn - 1.0)});
      }
    }
    double integral = 0.0;
    for (double k2 : {0.05, 0.3, 0.6, 0.9, 0.99}) {
      for (double phi : {0.1, 0.5, 1.0, 1.4, 1.55}) {
        const auto fq = adaptive_quad(
            [&](double th) { return 1.0 / std::sqrt(1.0 - k2 * std::sin(th) * std::sin(th)); }, 0.0, phi);
        integral = std::max(integral, std::abs(elliptic_F(phi, k2) - fq.value) / fq.value);
        for (double n : {-2.0, -0.5, 0.3, 0.8}) {
          const auto pq = adaptive_quad(
              [&](double th) {
                const double s2 = std::sin(th) * std::sin(th);
                return 1.0 / ((1.0 - n * s2) * std::sqrt(1.0 - k2 * s2));
              },
              0.0, phi);
          integral = std::max(integral, std::abs(elliptic_Pi(phi, n, k2) - pq.value) / pq.value);
        }
      }
    }
    return Outcome{identity <= 1e-11 && integral <= 1e-10,
                   "identity residual " + sci(identity) + " on 10^4 points, integral rel. error " + sci(integral)};
  });

  criterion(7, "EH root interlacing and positive discriminant", 0.0, [&] {
    const EHRootReport r = verify_eh_roots(1000, seed);
    return Outcome{r.interlacing_failures == 0 && r.nonpositive_discriminants == 0 && r.max_root_residual <= 1e-12,
                   std::to_string(r.n_levels) + " levels, " + std::to_string(r.interlacing_failures) +
                       " interlacing failures, " + std::to_string(r.nonpositive_discriminants) +
                       " non-positive discriminants"};
  });

  criterion(8, "EH closed-form and degenerate tau against quadrature", 0.0, [&] {
    const EHTauReport r = verify_eh_tau(20, 20, seed);
    return Outcome{r.max_rel_error_closed <= tol.eh_tau && r.max_rel_error_degenerate <= tol.eh_tau,
                   "max rel. error closed " + sci(r.max_rel_error_closed) + ", degenerate " +
                       sci(r.max_rel_error_degenerate)};
  });

  criterion(9, "multicentre form reproduces the metric", 0.0, [&] {
    const MulticentreReport r = verify_multicentre(p, 50, seed);
    return Outcome{r.max_deviation <= 1e-6 && r.min_order >= 1.8,
                   "max deviation " + sci(r.max_deviation) + ", min observed order " + std::to_string(r.min_order)};
  });

  criterion(10, "EH flow is the equal-parameter limit of the reduced flow", 0.0, [&] {
    const EHLimitReport r = verify_eh_limit(1.0, 0.0, 100, seed);
    return Outcome{r.max_rhs_mismatch <= 1e-10, "max rhs mismatch " + sci(r.max_rhs_mismatch)};
  });

  std::cout << (failures == 0 ? "ALL PASS" : std::to_string(failures) + " FAILED") << std::endl;
  return failures == 0 ? 0 : 1;
}
