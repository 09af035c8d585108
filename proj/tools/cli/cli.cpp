#include "cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <cmath>
#include <fstream>
#include <json.hpp>
#include <numbers>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>

#include "quantfix/asymptotics.hpp"
#include "quantfix/oracle.hpp"
#include "quantfix/oscillator.hpp"
#include "table.hpp"

namespace quantfix::cli {

namespace {

using json = nlohmann::json;

/// Failure already mapped to an exit code.
struct CommandFailure {
  int code;
  std::string message;
};

struct RunConfig {
  std::string command;
  int M = 2;
  std::optional<double> theta;
  std::string parity = "both";
  std::size_t N = 0;
  std::size_t levels = 10;
  double tol = 1e-10;
  std::vector<double> eps;
  int steps = 0;
  std::string format;
  std::string out_path;
  std::optional<double> perturb_eps;
  double perturb_amp = 0.1;
  double seed_scale = 1.0;
  bool refine = false;
  double bound = 1e-3;
  bool upper = false;
  bool lower = false;
  double shift = 100.0;
  std::size_t n_param = 6;
  double slack = kDefaultBracketSlack;
  double rate_eps = 1.0;
};

/// A command's output: one table for CSV, one document for JSON.
struct Artifact {
  Table table;
  json document;
};

json problem_json(const OscillatorProblem& p, std::size_t n) {
  return json{{"M", p.M},
              {"theta", p.kernel.theta()},
              {"alpha", p.alpha},
              {"nu", p.nu},
              {"N", n}};
}

std::string fmt(double v) { return format_number(v); }
std::string fmt(std::size_t v) { return format_number(static_cast<long>(v)); }

std::vector<Parity> parities(const std::string& which) {
  if (which == "even") return {Parity::EVEN};
  if (which == "odd") return {Parity::ODD};
  return {Parity::EVEN, Parity::ODD};
}

template <typename F>
auto solver_stage(F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const Error& e) {
    throw CommandFailure{kConvergenceFailure, e.what()};
  }
}

template <typename F>
auto oracle_stage(F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const Error& e) {
    throw CommandFailure{kOracleFailure, e.what()};
  }
}

void require_problem(const RunConfig& rc) {
  if (rc.M < 2) throw CommandFailure{kUsage, "--M must be >= 2"};
}

OperatorConfig operator_config(std::size_t n) {
  OperatorConfig cfg;
  cfg.truncation = n;
  return cfg;
}

Artifact cmd_spectrum(const RunConfig& rc) {
  require_problem(rc);
  if (rc.levels < 1) throw CommandFailure{kUsage, "--levels must be >= 1"};
  const std::size_t n = rc.N ? rc.N : 500;
  const auto which = parities(rc.parity);
  const std::size_t per_parity = which.size() == 2 ? (rc.levels + 1) / 2 : rc.levels;
  if (n < per_parity) throw CommandFailure{kUsage, "--N too small for the requested levels"};

  StopRule stop;
  stop.target_residual = rc.tol;
  stop.max_steps = rc.steps ? rc.steps : 400;
  const OperatorConfig cfg = operator_config(n);

  Artifact a;
  a.table.columns = {"level", "energy", "parity", "parity_index", "residual", "iterations"};
  json residuals = json::object();
  json iterations = json::object();
  std::vector<double> energies;

  if (which.size() == 2) {
    const SpectrumResult r = solver_stage([&] { return solve_spectrum(rc.M, cfg, stop); });
    residuals = {{"even", r.even_residual}, {"odd", r.odd_residual}};
    iterations = {{"even", r.even_iterations}, {"odd", r.odd_iterations}};
    for (std::size_t i = 0; i < rc.levels; ++i) {
      const bool even = i % 2 == 0;
      energies.push_back(r.energies[i]);
      a.table.add_row({fmt(i), fmt(r.energies[i]), even ? "even" : "odd", fmt(i / 2 + 1),
                       fmt(even ? r.even_residual : r.odd_residual),
                       fmt(even ? r.even_iterations : r.odd_iterations)});
    }
  } else {
    const auto problem = build_problem(rc.M, which.front());
    const auto sol = solver_stage([&] { return solve_parity(problem, cfg, stop); });
    const std::string name(to_string(which.front()));
    residuals[name] = sol.trace.residual_sup.back();
    iterations[name] = sol.trace.steps();
    const std::size_t offset = which.front() == Parity::EVEN ? 0 : 1;
    for (std::size_t i = 0; i < rc.levels; ++i) {
      energies.push_back(sol.fixed_point[i]);
      a.table.add_row({fmt(2 * i + offset), fmt(sol.fixed_point[i]), name, fmt(i + 1),
                       fmt(sol.trace.residual_sup.back()), fmt(sol.trace.steps())});
    }
  }
  a.document = {{"problem", problem_json(build_problem(rc.M, Parity::EVEN), n)},
                {"parity", rc.parity},
                {"energies", energies},
                {"residuals", residuals},
                {"iterations", iterations}};
  return a;
}

Artifact cmd_iterate(const RunConfig& rc) {
  require_problem(rc);
  const std::size_t n = rc.N ? rc.N : 500;
  if (!(rc.seed_scale > 0.0)) throw CommandFailure{kUsage, "--seed-scale must be positive"};
  const int steps = rc.steps ? rc.steps : 30;
  const OperatorConfig cfg = operator_config(n);

  Artifact a;
  a.table.columns = {"parity",      "step",         "residual_sup", "residual_weighted",
                     "error_sup",   "error_weighted", "fitted_rate", "predicted_rate"};
  a.document = {{"problem", problem_json(build_problem(rc.M, Parity::EVEN), n)},
                {"epsilon", rc.rate_eps},
                {"runs", json::array()}};

  for (Parity parity : parities(rc.parity)) {
    const auto problem = build_problem(rc.M, parity);
    StopRule ref_stop;
    ref_stop.target_residual = std::min(rc.tol, 1e-12);
    ref_stop.max_steps = 600;
    // The tightest attainable residual sits near the rounding floor, so the
    // reference run is accepted once it stalls there.
    const IterationTrace ref_trace = solver_stage([&] {
      return iterate(seed(problem, n), problem.q, problem.kernel, cfg, ref_stop);
    });
    if (ref_trace.residual_sup.back() > 1e-10) {
      throw CommandFailure{kConvergenceFailure, "reference fixed point did not converge"};
    }
    const EnergySequence reference = ref_trace.last();

    // Only the stored prefix is scaled; the tail keeps the seed's growth
    // class, which is what pins the normalization.
    const EnergySequence base = seed(problem, n);
    std::vector<double> scaled(base.values().begin(), base.values().end());
    for (double& v : scaled) v *= rc.seed_scale;
    EnergySequence start(std::move(scaled), base.tail());
    if (rc.perturb_eps) {
      LogSequence logs = log_coords(start);
      for (std::size_t k = 0; k < logs.size(); ++k) {
        logs.entries[k] += rc.perturb_amp * std::pow(static_cast<double>(k + 1), -*rc.perturb_eps);
      }
      start = EnergySequence::from_logs(logs.entries, start.tail());
    }
    StopRule stop;
    stop.max_steps = steps;
    stop.target_residual = 0.0;
    stop.rate_epsilon = rc.rate_eps;
    const IterationTrace trace =
        solver_stage([&] { return iterate(start, problem.q, problem.kernel, cfg, stop); });

    double fitted = std::nan("");
    try {
      fitted = empirical_rate(trace, reference, rc.rate_eps, cfg.root_tol);
    } catch (const Error&) {
    }
    const double predicted = contraction_factor(rc.rate_eps, problem.kernel).factor;
    const std::string name(to_string(parity));
    json rows = json::array();
    for (std::size_t s = 0; s < trace.iterates.size(); ++s) {
      const double err_sup = log_distance(trace.iterates[s], reference, 0.0);
      const double err_w = log_distance(trace.iterates[s], reference, rc.rate_eps);
      const double res_sup = s == 0 ? std::nan("") : trace.residual_sup[s - 1];
      const double res_w = s == 0 ? std::nan("") : trace.residual_weighted[s - 1];
      a.table.add_row({name, fmt(s), fmt(res_sup), fmt(res_w), fmt(err_sup), fmt(err_w),
                       fmt(fitted), fmt(predicted)});
      rows.push_back({{"step", s},
                      {"residual_sup", s == 0 ? json(nullptr) : json(res_sup)},
                      {"residual_weighted", s == 0 ? json(nullptr) : json(res_w)},
                      {"error_sup", err_sup},
                      {"error_weighted", err_w}});
    }
    const auto offset = log_difference(trace.last(), reference);
    double mean_offset = 0.0;
    for (double d : offset) mean_offset += d;
    mean_offset /= static_cast<double>(offset.size());
    a.document["runs"].push_back(
        {{"parity", name},
         {"steps", rows},
         {"fitted_rate", std::isnan(fitted) ? json(nullptr) : json(fitted)},
         {"predicted_rate", predicted},
         {"seed_scale", rc.seed_scale},
         {"final_distance_to_reference", log_distance(trace.last(), reference, 0.0)},
         {"final_mean_log_offset", mean_offset}});
  }
  return a;
}

std::string fmt_or_inf(double v) { return std::isfinite(v) ? fmt(v) : "inf"; }
json json_or_inf(double v) { return std::isfinite(v) ? json(v) : json("inf"); }

Artifact cmd_analyze(const RunConfig& rc, bool m_given) {
  double theta = 0.0;
  if (rc.theta && m_given) throw CommandFailure{kUsage, "give either --theta or --M, not both"};
  if (rc.theta) {
    theta = *rc.theta;
    if (!(theta > 0.0 && theta < std::numbers::pi)) {
      throw CommandFailure{kUsage, "--theta must lie in (0, pi)"};
    }
  } else {
    require_problem(rc);
    theta = build_problem(rc.M, Parity::EVEN).kernel.theta();
  }
  const KernelParams kernel(theta);
  std::set<double> grid;
  if (rc.eps.empty()) {
    for (int i = 1; i <= 19; ++i) grid.insert(i / 10.0);
  } else {
    for (double e : rc.eps) {
      grid.insert(e);
      grid.insert(2.0 - e);
    }
  }

  Artifact a;
  a.table.columns = {"kind", "x", "integral", "closed", "gap", "factor"};
  const AlphaStarCheck star = alpha_star_verified(kernel);
  a.table.add_row({"alpha_star", fmt(theta), fmt(star.bisected), fmt(star.closed), fmt(star.gap), ""});
  json drift = json::array();
  for (double alpha : {1.1, 1.5, 2.0, 3.0, 8.0, star.closed}) {
    const DriftReport d = drift_report(alpha, kernel);
    a.table.add_row({"drift", fmt(alpha), fmt(d.integral_value), fmt(d.closed_value), fmt(d.abs_gap), ""});
    drift.push_back({{"alpha", alpha}, {"integral", d.integral_value}, {"closed", d.closed_value},
                     {"gap", d.abs_gap}});
  }
  json s_rows = json::array();
  for (double e : grid) {
    const double si = s_integral(e, kernel);
    const ContractionReport c = contraction_factor(e, kernel);
    const double gap = std::isfinite(si) ? std::abs(si - c.s_eps) : 0.0;
    a.table.add_row({"s", fmt(e), fmt_or_inf(si), fmt_or_inf(c.s_eps), fmt(gap), fmt_or_inf(c.factor)});
    s_rows.push_back({{"epsilon", e}, {"integral", json_or_inf(si)}, {"closed", json_or_inf(c.s_eps)},
                      {"gap", gap}, {"factor", json_or_inf(c.factor)}});
  }
  a.document = {{"theta", theta},
                {"alpha_star", {{"closed", star.closed}, {"bisected", star.bisected}, {"gap", star.gap}}},
                {"drift", drift},
                {"contraction", s_rows},
                {"predicted_rate_at_1", alpha_star(kernel) - 1.0}};
  return a;
}

struct Deviations {
  std::vector<double> energies;
  std::vector<double> rel;
  double max_rel = 0.0;
};

Deviations deviations(const RunConfig& rc, std::size_t n, const std::vector<double>& reference) {
  StopRule stop;
  stop.target_residual = rc.tol;
  stop.max_steps = rc.steps ? rc.steps : 400;
  const SpectrumResult r = solver_stage([&] { return solve_spectrum(rc.M, operator_config(n), stop); });
  Deviations d;
  for (std::size_t i = 0; i < reference.size(); ++i) {
    d.energies.push_back(r.energies[i]);
    d.rel.push_back(std::abs(r.energies[i] - reference[i]) / std::abs(reference[i]));
    d.max_rel = std::max(d.max_rel, d.rel.back());
  }
  return d;
}

Artifact cmd_verify(const RunConfig& rc, int& exit_code) {
  require_problem(rc);
  if (rc.levels < 1) throw CommandFailure{kUsage, "--levels must be >= 1"};
  const std::size_t n = rc.N ? rc.N : 1000;
  if (n < (rc.levels + 1) / 2) throw CommandFailure{kUsage, "--N too small for the requested levels"};

  oracle::OracleConfig ocfg;
  ocfg.grid_points = std::max<std::size_t>(ocfg.grid_points, 16 * rc.levels);
  const std::vector<double> reference =
      oracle_stage([&] { return oracle::hamiltonian_eigs(rc.M, rc.levels, ocfg); });
  const Deviations base = deviations(rc, n, reference);
  std::optional<Deviations> refined;
  if (rc.refine) refined = deviations(rc, 2 * n, reference);

  Artifact a;
  a.table.columns = {"level", "energy", "oracle", "abs_dev", "rel_dev"};
  if (refined) {
    a.table.columns.insert(a.table.columns.end(), {"energy_refined", "rel_dev_refined"});
  }
  bool monotone = true;
  json levels = json::array();
  for (std::size_t i = 0; i < reference.size(); ++i) {
    const double abs_dev = std::abs(base.energies[i] - reference[i]);
    std::vector<std::string> row{fmt(i), fmt(base.energies[i]), fmt(reference[i]), fmt(abs_dev),
                                 fmt(base.rel[i])};
    json entry{{"level", i},
               {"parity", i % 2 == 0 ? "even" : "odd"},
               {"energy", base.energies[i]},
               {"oracle", reference[i]},
               {"abs_dev", abs_dev},
               {"rel_dev", base.rel[i]}};
    if (refined) {
      row.push_back(fmt(refined->energies[i]));
      row.push_back(fmt(refined->rel[i]));
      entry["energy_refined"] = refined->energies[i];
      entry["rel_dev_refined"] = refined->rel[i];
      monotone = monotone && refined->rel[i] <= base.rel[i];
    }
    a.table.add_row(std::move(row));
    levels.push_back(entry);
  }
  const bool within = base.max_rel <= rc.bound;
  a.document = {{"problem", problem_json(build_problem(rc.M, Parity::EVEN), n)},
                {"levels", levels},
                {"max_rel_dev", base.max_rel},
                {"bound", rc.bound},
                {"pass", within && monotone}};
  if (refined) {
    a.document["refinement"] = {{"N", 2 * n}, {"max_rel_dev", refined->max_rel}, {"monotone", monotone}};
  }
  exit_code = within && monotone ? kSuccess : kToleranceFailure;
  return a;
}

Artifact cmd_bracket(const RunConfig& rc, int& exit_code) {
  require_problem(rc);
  if (rc.parity == "both") throw CommandFailure{kUsage, "bracket needs --parity even or odd"};
  const std::size_t n = rc.N ? rc.N : 2000;
  const bool upper = rc.upper || !rc.lower;
  const bool lower = rc.lower || !rc.upper;
  const auto problem = build_problem(rc.M, parities(rc.parity).front());
  const OperatorConfig cfg = operator_config(n);

  Artifact a;
  a.table.columns = {"kind", "parameter", "verified", "max_violation", "worst_index"};
  a.document = {{"problem", problem_json(problem, n)},
                {"parity", rc.parity},
                {"slack", rc.slack},
                {"certificates", json::array()}};
  bool all = true;
  auto record = [&](const BracketCertificate& c, const std::string& param_name, double param) {
    const std::string kind = c.kind == BracketKind::SUPER ? "SUPER" : "SUB";
    a.table.add_row({kind, fmt(param), c.verified ? "true" : "false", fmt(c.max_violation),
                     format_number(c.worst_index)});
    a.document["certificates"].push_back({{"kind", kind},
                                          {param_name, param},
                                          {"verified", c.verified},
                                          {"max_violation", c.max_violation},
                                          {"worst_index", c.worst_index}});
    all = all && c.verified;
  };
  try {
    if (upper) {
      const auto x = upper_bracket(rc.shift, n, problem.kernel);
      record(verify_bracket(x, problem.q, problem.kernel, cfg, BracketKind::SUPER, rc.slack), "A",
             rc.shift);
    }
    if (lower) {
      const auto x = lower_bracket(rc.n_param, n, problem.kernel);
      record(verify_bracket(x, problem.q, problem.kernel, cfg, BracketKind::SUB, rc.slack), "Nparam",
             static_cast<double>(rc.n_param));
    }
  } catch (const Error& e) {
    if (e.code() == ErrorCode::DomainError || e.code() == ErrorCode::InvalidArgument) {
      throw CommandFailure{kUsage, e.what()};
    }
    throw CommandFailure{kConvergenceFailure, e.what()};
  }
  exit_code = all ? kSuccess : kToleranceFailure;
  return a;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  RunConfig rc;
  CLI::App app{"Fixed-point computation of anharmonic oscillator spectra", "quantfix"};
  app.set_config("--config", "", "Flat key=value file; flags given on the command line win");
  app.require_subcommand(1);
  auto* m_opt = app.add_option("--M", rc.M, "Potential exponent: q^(2M), M >= 2");
  app.add_option("--theta", rc.theta, "Kernel angle in (0, pi) (analyze only)");
  app.add_option("--parity", rc.parity, "Parity")->check(CLI::IsMember({"even", "odd", "both"}));
  app.add_option("--N", rc.N, "Truncation length");
  app.add_option("--levels", rc.levels, "Number of merged levels");
  app.add_option("--tol", rc.tol, "Target sup-log residual");
  app.add_option("--eps", rc.eps, "Weight exponents (analyze) ")->expected(0, -1);
  app.add_option("--rate-eps", rc.rate_eps, "Norm weight for residuals and rate fits");
  app.add_option("--steps", rc.steps, "Iteration steps (iterate) or step budget");
  app.add_option("--format", rc.format, "Output format")->check(CLI::IsMember({"csv", "json"}));
  app.add_option("--out", rc.out_path, "Output file (default: stdout)");
  app.add_option("--perturb-eps", rc.perturb_eps, "Perturb the seed by amp * k^-eps in log coordinates");
  app.add_option("--perturb-amp", rc.perturb_amp, "Amplitude of the seed perturbation");
  app.add_option("--seed-scale", rc.seed_scale, "Multiply the seed by this factor");
  app.add_flag("--refine", rc.refine, "Also run at 2N and require non-increasing deviations");
  app.add_option("--bound", rc.bound, "Relative deviation bound (verify)");
  app.add_flag("--upper", rc.upper, "Upper bracket (k + A)^alpha");
  app.add_flag("--lower", rc.lower, "Lower staircase bracket");
  app.add_option("--A", rc.shift, "Shift of the upper bracket");
  app.add_option("--Nparam", rc.n_param, "Staircase parameter of the lower bracket");
  app.add_option("--slack", rc.slack, "Bracket certificate slack");
  for (const char* name : {"spectrum", "iterate", "analyze", "verify", "bracket"}) {
    app.add_subcommand(name)->fallthrough();
  }

  std::vector<std::string> argv_rev(args.rbegin(), args.rend() - (args.empty() ? 0 : 1));
  try {
    app.parse(argv_rev);
  } catch (const CLI::CallForHelp& e) {
    app.exit(e, out, err);
    return kSuccess;
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kUsage;
  }
  rc.command = app.get_subcommands().front()->get_name();
  if (rc.format.empty()) rc.format = rc.command == "verify" ? "json" : "csv";

  int code = kSuccess;
  Artifact artifact;
  try {
    if (rc.command == "spectrum") artifact = cmd_spectrum(rc);
    else if (rc.command == "iterate") artifact = cmd_iterate(rc);
    else if (rc.command == "analyze") artifact = cmd_analyze(rc, m_opt->count() > 0);
    else if (rc.command == "verify") artifact = cmd_verify(rc, code);
    else artifact = cmd_bracket(rc, code);
  } catch (const CommandFailure& f) {
    err << "quantfix " << rc.command << ": " << f.message << "\n";
    if (f.code == kUsage) err << "Run with --help for more information.\n";
    return f.code;
  } catch (const Error& e) {
    // Construction errors from invalid parameter combinations.
    err << "quantfix " << rc.command << ": " << e.what() << "\n";
    return kUsage;
  }

  const std::string payload =
      rc.format == "json" ? artifact.document.dump(2) + "\n" : emit_csv(artifact.table);
  if (rc.out_path.empty()) {
    out << payload;
  } else {
    std::ofstream file(rc.out_path, std::ios::binary);
    if (!file) {
      err << "quantfix: cannot write " << rc.out_path << "\n";
      return kUsage;
    }
    file << payload;
  }
  if (code != kSuccess) err << "quantfix " << rc.command << ": tolerance check failed\n";
  return code;
}

}  // namespace quantfix::cli
