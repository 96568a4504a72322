// bgpp: run geodesic flows, verification sweeps and tau tables from the command line.
//
// Exit codes: 0 success, 1 verification failure, 2 usage error, 3 runtime failure.

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iomanip>
#include <iostream>
#include <memory>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "bgpp/bgpp.hpp"

namespace {

using nlohmann::json;

constexpr int kExitVerifyFailed = 1;
constexpr int kExitUsage = 2;
constexpr int kExitRuntime = 3;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Options {
  std::string params;
  std::optional<double> gamma2;
  std::string state;
  std::string levels;
  std::string span = "0,10";
  double rel_tol = 1e-10;
  double abs_tol = 1e-12;
  double stride = 0.0;
  std::string grid;
  std::string format = "csv";
  std::string out;
  std::uint64_t seed = bgpp::kDefaultSeed;
  std::string flow = "reduced";
  std::vector<std::string> checks;
};

std::vector<double> parse_list(const std::string& text, const std::string& flag, std::size_t expected) {
  std::vector<double> values;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      throw UsageError(flag + ": '" + item + "' is not a number");
    }
    if (used != item.size()) throw UsageError(flag + ": '" + item + "' is not a number");
    values.push_back(v);
  }
  if (values.size() != expected)
    throw UsageError(flag + " expects " + std::to_string(expected) + " comma-separated values, got " +
                     std::to_string(values.size()));
  return values;
}

/// Runs `f`, reporting library errors raised while checking inputs as usage errors.
template <class F>
auto checked_input(F&& f) {
  try {
    return f();
  } catch (const bgpp::Error& e) {
    throw UsageError(e.what());
  }
}

bgpp::MetricParams read_params(const Options& o) {
  if (o.params.empty()) throw UsageError("--params t1,t2,t3 is required");
  const auto t = parse_list(o.params, "--params", 3);
  return checked_input([&] { return bgpp::validate_params(t[0], t[1], t[2]); });
}

/// gamma^2 from --gamma2, or from --params when they follow the pattern t1 = t2 > t3.
double read_gamma2(const Options& o) {
  if (o.gamma2) {
    checked_input([&] {
      bgpp::require_gamma2(*o.gamma2);
      return 0;
    });
    return *o.gamma2;
  }
  if (!o.params.empty()) return checked_input([&] { return bgpp::eh_limit(read_params(o)).gamma2; });
  throw UsageError("EH mode needs --gamma2 or --params with t1 = t2 > t3");
}

bgpp::IntegratorConfig read_config(const Options& o) {
  bgpp::IntegratorConfig cfg;
  cfg.rel_tol = o.rel_tol;
  cfg.abs_tol = o.abs_tol;
  cfg.sample_stride = o.stride;
  checked_input([&] {
    cfg.validate();
    return 0;
  });
  return cfg;
}

std::pair<double, double> read_span(const Options& o) {
  const auto s = parse_list(o.span, "--span", 2);
  if (!std::isfinite(s[0]) || !std::isfinite(s[1])) throw UsageError("--span must be finite");
  return {s[0], s[1]};
}

void check_format(const Options& o, std::initializer_list<const char*> allowed) {
  for (const char* f : allowed)
    if (o.format == f) return;
  throw UsageError("unsupported --format '" + o.format + "'");
}

/// Destination stream: --out file or stdout.
class Output {
 public:
  explicit Output(const std::string& path) {
    if (!path.empty()) {
      file_ = std::make_unique<std::ofstream>(path);
      if (!*file_) throw std::runtime_error("cannot open output file " + path);
    }
    stream().precision(17);
  }
  std::ostream& stream() { return file_ ? *file_ : std::cout; }

 private:
  std::unique_ptr<std::ofstream> file_;
};

std::string join(const std::vector<double>& v) {
  std::ostringstream os;
  os.precision(17);
  for (std::size_t i = 0; i < v.size(); ++i) os << (i ? "," : "") << v[i];
  return os.str();
}

// ---------------------------------------------------------------------------
// simulate

int cmd_simulate(const Options& o) {
  check_format(o, {"csv", "json"});
  const auto [l0, l1] = read_span(o);
  const bgpp::IntegratorConfig cfg = read_config(o);

  json meta = {{"command", "simulate"}, {"flow", o.flow}, {"seed", o.seed}, {"rel_tol", cfg.rel_tol},
               {"abs_tol", cfg.abs_tol}, {"span", {l0, l1}}, {"stride", cfg.sample_stride}};
  bgpp::Trajectory traj;
  if (o.flow == "full" || o.flow == "reduced") {
    const bgpp::MetricParams p = read_params(o);
    meta["params"] = p.t;
    if (o.flow == "full") {
      const auto x = parse_list(o.state, "--state", 8);
      const bgpp::MixedState s = bgpp::MixedState::from(std::array<double, 8>{x[0], x[1], x[2], x[3], x[4], x[5], x[6], x[7]});
      checked_input([&] {
        bgpp::require_regular_angle(s.theta);
        return bgpp::hamiltonian(s, p);
      });
      traj = bgpp::integrate(s, p, l0, l1, cfg);
    } else {
      const auto x = parse_list(o.state, "--state", 5);
      const bgpp::ReducedState s{x[0], x[1], x[2], x[3], x[4]};
      checked_input([&] { return bgpp::reduced_hamiltonian(s, p); });
      traj = bgpp::integrate(s, p, l0, l1, cfg);
    }
  } else if (o.flow == "eh") {
    const double g2 = read_gamma2(o);
    meta["gamma2"] = g2;
    const auto x = parse_list(o.state, "--state", 5);
    const bgpp::EHState s{x[0], x[1], x[2], x[3], x[4]};
    checked_input([&] { return bgpp::eh_hamiltonian(s, g2); });
    traj = bgpp::integrate(s, g2, l0, l1, cfg);
  } else {
    throw UsageError("--flow must be full, reduced or eh");
  }

  std::vector<std::string> columns = {"lambda"};
  for (const auto& n : traj.state_names) columns.push_back(n);
  for (const auto& n : traj.integral_names) columns.push_back(n);
  for (const auto& n : traj.integral_names) columns.push_back("drift_" + n);

  Output out(o.out);
  std::ostream& os = out.stream();
  const auto row_values = [&](const bgpp::Sample& s) {
    std::vector<double> v = {s.lambda};
    v.insert(v.end(), s.state.begin(), s.state.end());
    v.insert(v.end(), s.integrals.begin(), s.integrals.end());
    for (std::size_t i = 0; i < s.integrals.size(); ++i) {
      const auto& d = traj.drift_report[i];
      const double diff = std::abs(s.integrals[i] - d.initial);
      v.push_back(d.scale > 0.0 ? diff / d.scale : diff);
    }
    return v;
  };

  json drift = json::object();
  for (const auto& d : traj.drift_report) drift[d.name] = d.max_relative;
  if (o.format == "csv") {
    for (auto it = meta.begin(); it != meta.end(); ++it) os << "# " << it.key() << ": " << it.value().dump() << '\n';
    os << "# accepted_steps: " << traj.accepted_steps << "\n# rejected_steps: " << traj.rejected_steps << '\n';
    os << "# max_drift: " << drift.dump() << '\n';
    for (std::size_t i = 0; i < columns.size(); ++i) os << (i ? "," : "") << columns[i];
    os << '\n';
    for (const auto& s : traj.samples) os << join(row_values(s)) << '\n';
  } else {
    meta["accepted_steps"] = traj.accepted_steps;
    meta["rejected_steps"] = traj.rejected_steps;
    meta["max_drift"] = drift;
    os << json{{"meta", meta}}.dump() << '\n';
    for (const auto& s : traj.samples) {
      const auto v = row_values(s);
      json row = json::object();
      for (std::size_t i = 0; i < columns.size(); ++i) row[columns[i]] = v[i];
      os << row.dump() << '\n';
    }
  }
  return 0;
}

// ---------------------------------------------------------------------------
// verify

const std::set<std::string> kAllChecks = {"brackets", "conservation", "radial", "analytic", "multicentre", "eh"};

json bracket_section(const bgpp::MetricParams& p, std::uint64_t seed) {
  const bgpp::BracketReport r = bgpp::verify_bracket_suite(p, 100, seed);
  const bgpp::VerifyTolerances tol;
  return {{"passed", r.passed()},
          {"samples", r.n_samples},
          {"full_pairs", r.full_pairs},
          {"reduced_pairs", r.reduced_pairs},
          {"max_full_bracket", r.full_bracket_max()},
          {"max_reduced_bracket", r.reduced_bracket_max()},
          {"jacobi_full", r.jacobi_full},
          {"jacobi_full_fd", r.jacobi_full_fd},
          {"jacobi_reduced", r.jacobi_reduced},
          {"casimir_annihilation", r.casimir_annihilation},
          {"full_rank_margin", r.full_rank_margin},
          {"reduced_rank_margin", r.reduced_rank_margin},
          {"reduced_tensor_rank", {r.reduced_tensor_rank_min, r.reduced_tensor_rank_max}},
          {"rhs_residual_full", r.rhs_residual_full},
          {"rhs_residual_reduced", r.rhs_residual_reduced},
          {"gradient_residual", r.gradient_residual},
          {"tolerance", {{"bracket", tol.bracket}, {"jacobi", tol.jacobi}, {"jacobi_fd", tol.jacobi_fd},
                         {"rank_margin", tol.rank_margin}}}};
}

json analytic_section(const bgpp::MetricParams& p, const bgpp::IntegratorConfig& cfg) {
  json cases = json::array();
  bool passed = true;
  std::vector<bgpp::EulerCaseId> ids = {bgpp::EulerCaseId::I, bgpp::EulerCaseId::II, bgpp::EulerCaseId::III};
  if (p.degeneracy != bgpp::Degeneracy::Generic) ids = {bgpp::EulerCaseId::I};
  for (const auto id : ids) {
    const bgpp::ReducedState s = bgpp::representative_state(p, id);
    const bgpp::AnalyticReport r =
        bgpp::verify_analytic_vs_numeric(bgpp::levels_from_state(s, p), p, s, 0.0, 10.0, cfg);
    passed = passed && r.passed();
    cases.push_back({{"case", bgpp::to_string(r.case_id)},
                     {"passed", r.passed()},
                     {"initial_M", {s.M1, s.M2, s.M3}},
                     {"k2", r.k2},
                     {"ill_conditioned", r.ill_conditioned},
                     {"branches", r.branches},
                     {"samples", r.samples},
                     {"max_error", r.max_error},
                     {"max_abs_error", r.max_abs_error},
                     {"tau_ode_mismatch", r.tau_ode_mismatch}});
  }
  return {{"passed", passed}, {"tolerance", bgpp::VerifyTolerances{}.analytic}, {"cases", cases}};
}

json eh_section(double gamma2, std::uint64_t seed, const bgpp::IntegratorConfig& cfg) {
  const bgpp::VerifyTolerances tol;
  const bgpp::EHRootReport roots = bgpp::verify_eh_roots(1000, seed);
  const bgpp::EHTauReport tau = bgpp::verify_eh_tau(20, 20, seed);
  const bgpp::EHLimitReport limit = bgpp::verify_eh_limit(gamma2, 0.0, 100, seed);
  const double g = std::sqrt(gamma2);
  const bgpp::EHAnalyticReport analytic =
      bgpp::verify_eh_analytic({2.0 * g, -0.5, 0.6, 0.4, 0.7}, gamma2, 0.0, 10.0, cfg);
  const bool passed = roots.passed() && tau.passed() && limit.passed() && analytic.passed();
  return {{"passed", passed},
          {"gamma2", gamma2},
          {"roots",
           {{"passed", roots.passed()},
            {"levels", roots.n_levels},
            {"interlacing_failures", roots.interlacing_failures},
            {"nonpositive_discriminants", roots.nonpositive_discriminants},
            {"max_root_residual", roots.max_root_residual},
            {"max_discriminant_mismatch", roots.max_discriminant_mismatch},
            {"k2_range", {roots.min_k2, roots.max_k2}}}},
          {"tau",
           {{"passed", tau.passed()},
            {"pairs", tau.n_pairs},
            {"max_rel_error_closed", tau.max_rel_error_closed},
            {"degenerate_pairs", tau.n_degenerate},
            {"max_rel_error_degenerate", tau.max_rel_error_degenerate},
            {"tolerance", tol.eh_tau}}},
          {"limit",
           {{"passed", limit.passed()},
            {"states", limit.n_states},
            {"max_rhs_mismatch", limit.max_rhs_mismatch},
            {"max_hamiltonian_mismatch", limit.max_hamiltonian_mismatch},
            {"tolerance", tol.eh_limit}}},
          {"analytic",
           {{"passed", analytic.passed()},
            {"samples", analytic.samples},
            {"branches", analytic.branches},
            {"max_error", analytic.max_error},
            {"tolerance", tol.analytic}}}};
}

int cmd_verify(Options o) {
  if (o.params.empty()) o.params = "0,1,2";
  if (o.format == "csv") o.format = "json";
  check_format(o, {"json"});
  const bgpp::MetricParams p = read_params(o);
  const bgpp::IntegratorConfig cfg = read_config(o);
  std::set<std::string> checks(o.checks.begin(), o.checks.end());
  if (checks.empty()) checks = kAllChecks;
  for (const auto& c : checks)
    if (!kAllChecks.count(c)) throw UsageError("unknown check '" + c + "'");
  const double gamma2 = o.gamma2 ? read_gamma2(o) : 1.0;

  const bgpp::VerifyTolerances tol;
  json report = {{"params", p.t}, {"seed", o.seed}, {"rel_tol", cfg.rel_tol}, {"abs_tol", cfg.abs_tol}};
  json sections = json::object();
  if (checks.count("brackets")) sections["brackets"] = bracket_section(p, o.seed);
  if (checks.count("conservation") || checks.count("radial")) {
    const bgpp::ConservationReport r = bgpp::verify_conservation(p, 20, o.seed, 10.0, cfg);
    if (checks.count("conservation"))
      sections["conservation"] = {{"passed", r.max_drift_full <= tol.drift && r.max_drift_reduced <= tol.drift},
                                  {"runs", r.runs},
                                  {"span", r.span},
                                  {"max_drift_full", r.max_drift_full},
                                  {"max_drift_reduced", r.max_drift_reduced},
                                  {"steps", r.steps},
                                  {"tolerance", tol.drift}};
    if (checks.count("radial"))
      sections["radial"] = {{"passed", r.max_radial_residual <= tol.radial},
                            {"max_residual", r.max_radial_residual},
                            {"tolerance", tol.radial}};
  }
  if (checks.count("analytic")) sections["analytic"] = analytic_section(p, cfg);
  if (checks.count("multicentre")) {
    const bgpp::MulticentreReport r = bgpp::verify_multicentre(p, 50, o.seed);
    sections["multicentre"] = {{"passed", r.passed()},     {"points", r.n_points},
                               {"h", r.h},                 {"max_deviation", r.max_deviation},
                               {"order_h", r.order_h},     {"min_order", r.min_order},
                               {"tolerance", tol.multicentre}, {"min_order_required", tol.multicentre_order}};
  }
  if (checks.count("eh")) sections["eh"] = eh_section(gamma2, o.seed, cfg);

  bool passed = true;
  for (const auto& [name, section] : sections.items()) passed = passed && section.at("passed").get<bool>();
  report["passed"] = passed;
  report["checks"] = sections;

  Output out(o.out);
  out.stream() << report.dump(2) << '\n';
  return passed ? 0 : kExitVerifyFailed;
}

// ---------------------------------------------------------------------------
// tau-table

std::vector<double> read_grid(const Options& o) {
  if (o.grid.empty()) throw UsageError("--grid lo,hi,n is required");
  const auto g = parse_list(o.grid, "--grid", 3);
  const double n = g[2];
  if (!(n >= 1.0) || n != std::floor(n)) throw UsageError("--grid: n must be a positive integer");
  if (!std::isfinite(g[0]) || !std::isfinite(g[1])) throw UsageError("--grid bounds must be finite");
  std::vector<double> grid;
  const int count = static_cast<int>(n);
  for (int i = 0; i < count; ++i) grid.push_back(count == 1 ? g[0] : g[0] + (g[1] - g[0]) * i / (count - 1));
  return grid;
}

void write_table(const Options& o, const json& meta, const std::vector<std::string>& columns,
                 const std::vector<std::vector<double>>& rows) {
  Output out(o.out);
  std::ostream& os = out.stream();
  if (o.format == "csv") {
    for (auto it = meta.begin(); it != meta.end(); ++it) os << "# " << it.key() << ": " << it.value().dump() << '\n';
    for (std::size_t i = 0; i < columns.size(); ++i) os << (i ? "," : "") << columns[i];
    os << '\n';
    for (const auto& r : rows) os << join(r) << '\n';
  } else {
    os << json{{"meta", meta}}.dump() << '\n';
    for (const auto& r : rows) {
      json row = json::object();
      for (std::size_t i = 0; i < columns.size(); ++i) row[columns[i]] = r[i];
      os << row.dump() << '\n';
    }
  }
}

int cmd_tau_table(const Options& o) {
  check_format(o, {"csv", "json"});
  const std::vector<double> grid = read_grid(o);
  if (o.levels.empty()) throw UsageError("--levels is required");
  const auto lv_in = parse_list(o.levels, "--levels", 3);
  const double base = grid.front();
  std::vector<std::vector<double>> rows;

  if (o.flow == "eh") {
    const double g2 = read_gamma2(o);
    const bgpp::EHLevels lv = checked_input([&] { return bgpp::make_eh_levels(lv_in[0], lv_in[1], lv_in[2], g2); });
    const bool degenerate = bgpp::is_degenerate_level(lv);
    const bgpp::EHLevels solved = degenerate ? lv : checked_input([&] { return bgpp::with_roots(lv); });
    const auto closed = [&](double rho) {
      return degenerate ? bgpp::eh_tau_degenerate(solved, rho) : bgpp::eh_tau_closed(solved, rho);
    };
    const double closed_base = closed(base);
    double worst = 0.0;
    for (double rho : grid) {
      const double q = bgpp::eh_tau_quadrature(solved, base, rho).value;
      const double c = closed(rho) - closed_base;
      worst = std::max(worst, std::abs(q - c));
      rows.push_back({rho, q, c, std::abs(q - c)});
    }
    json meta = {{"command", "tau-table"}, {"flow", "eh"}, {"gamma2", g2}, {"levels", lv_in},
                 {"degenerate", degenerate}, {"base", base}, {"max_abs_difference", worst}};
    if (!degenerate) meta["roots"] = solved.roots;
    write_table(o, meta, {"rho", "tau_quadrature", "tau_closed", "abs_difference"}, rows);
    return 0;
  }

  const bgpp::MetricParams p = read_params(o);
  const bgpp::LevelSet lv{lv_in[0], lv_in[1], lv_in[2]};
  for (double t : grid) {
    if (t < p.t_max) throw UsageError("--grid reaches below t_max");
    rows.push_back({t, bgpp::tau_of_t(lv, p, base, t)});
  }
  const json meta = {{"command", "tau-table"}, {"flow", "reduced"}, {"params", p.t}, {"levels", lv_in}, {"base", base}};
  write_table(o, meta, {"t", "tau"}, rows);
  return 0;
}

// ---------------------------------------------------------------------------
// eh

int cmd_eh(Options o) {
  if (o.format == "csv") o.format = "json";
  check_format(o, {"json"});
  const double g2 = read_gamma2(o);
  bgpp::EHLevels lv;
  if (!o.state.empty()) {
    const auto x = parse_list(o.state, "--state", 5);
    lv = checked_input([&] { return bgpp::eh_levels_from_state({x[0], x[1], x[2], x[3], x[4]}, g2); });
  } else if (!o.levels.empty()) {
    const auto x = parse_list(o.levels, "--levels", 3);
    lv = checked_input([&] { return bgpp::make_eh_levels(x[0], x[1], x[2], g2); });
  } else {
    throw UsageError("eh needs --levels e,m3,mu2 or --state rho,P_rho,M1,M2,M3");
  }

  json report = {{"gamma2", g2},
                 {"e", lv.e},
                 {"m3", lv.m3},
                 {"mu2", lv.mu2},
                 {"cubic_coefficients", bgpp::r_cubic_coefficients(lv)},
                 {"discriminant", bgpp::eh_discriminant(lv)},
                 {"degenerate", bgpp::is_degenerate_level(lv)}};
  if (lv.e > 0.0 && !bgpp::is_degenerate_level(lv) && lv.m3 != 0.0) {
    const auto r = bgpp::eh_roots(lv);
    report["roots"] = r;
    report["k2"] = (r[1] - r[0]) / (r[2] - r[0]);
    const double g = std::sqrt(g2);
    report["interlacing"] = -g < r[0] && r[0] < 0.0 && 0.0 < r[1] && r[1] < g && g < r[2];
    report["rotation_rate"] = g2 * lv.m3;
  } else if (lv.m3 == 0.0 && !bgpp::is_degenerate_level(lv)) {
    report["boundary_bolt"] = true;
  }
  Output out(o.out);
  out.stream() << report.dump(2) << '\n';
  return 0;
}

void add_common(CLI::App* cmd, Options& o) {
  cmd->add_option("--params", o.params, "metric parameters t1,t2,t3");
  cmd->add_option("--gamma2", o.gamma2, "EH parameter gamma^2");
  cmd->add_option("--state", o.state, "initial state, comma-separated");
  cmd->add_option("--levels", o.levels, "level set e,m2,n2 (or e,m3,mu2 in EH mode)");
  cmd->add_option("--span", o.span, "lambda span a,b")->capture_default_str();
  cmd->add_option("--rel-tol", o.rel_tol, "relative tolerance")->capture_default_str();
  cmd->add_option("--abs-tol", o.abs_tol, "absolute tolerance")->capture_default_str();
  cmd->add_option("--stride", o.stride, "lambda spacing of samples (0: every step)")->capture_default_str();
  cmd->add_option("--grid", o.grid, "grid lo,hi,n");
  cmd->add_option("--format", o.format, "csv or json")->capture_default_str();
  cmd->add_option("--out", o.out, "output path (default stdout)");
  cmd->add_option("--seed", o.seed, "seed for random sampling")->capture_default_str();
  cmd->add_option("--flow", o.flow, "full, reduced or eh")->capture_default_str();
}

int run(int argc, char** argv) {
  CLI::App app{"Geodesic flows of the triaxial BGPP metric and its Eguchi-Hanson limit"};
  app.require_subcommand(1);
  Options o;
  CLI::App* simulate = app.add_subcommand("simulate", "integrate a flow and write the trajectory");
  CLI::App* verify = app.add_subcommand("verify", "run verification checks and write a JSON report");
  CLI::App* tau = app.add_subcommand("tau-table", "tabulate tau(t), or tau(rho) with --flow eh");
  CLI::App* eh = app.add_subcommand("eh", "root structure of an EH level set");
  for (CLI::App* cmd : {simulate, verify, tau, eh}) add_common(cmd, o);
  verify->add_option("--checks", o.checks, "subset of brackets,conservation,radial,analytic,multicentre,eh")
      ->delimiter(',');

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  if (simulate->parsed()) return cmd_simulate(o);
  if (verify->parsed()) return cmd_verify(o);
  if (tau->parsed()) return cmd_tau_table(o);
  return cmd_eh(o);
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
}
