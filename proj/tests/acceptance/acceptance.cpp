// Acceptance suite. Prints one PASS/FAIL line per criterion; the exit status
// is nonzero if any selected criterion fails. Criteria can be selected by id
// on the command line (e.g. `quantfix_acceptance A3 A9`).

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "quantfix/asymptotics.hpp"
#include "quantfix/oracle.hpp"
#include "quantfix/oscillator.hpp"

using namespace quantfix;

namespace {

constexpr double kPi = std::numbers::pi;

struct Verdict {
  bool pass = true;
  std::ostringstream detail;
  std::vector<std::string> violations;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      violations.push_back(what);
    }
  }
};

struct Criterion {
  std::string id;
  std::string title;
  double budget_seconds;
  std::function<void(Verdict&)> body;
};

OperatorConfig config(std::size_t n) {
  OperatorConfig cfg;
  cfg.truncation = n;
  return cfg;
}

StopRule converge(double target) {
  StopRule s;
  s.target_residual = target;
  s.max_steps = 600;
  return s;
}

std::string fmt(double v, int digits = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

// ---------------------------------------------------------------------------

void a1_closed_forms(Verdict& v) {
  double drift_gap = 0.0, s_gap = 0.0;
  for (double t : {kPi / 6, kPi / 3, kPi / 2, 2 * kPi / 3, 5 * kPi / 6}) {
    const KernelParams p(t);
    for (double a : {1.1, 1.5, 2.0, 3.0, 8.0}) drift_gap = std::max(drift_gap, drift_report(a, p).abs_gap);
    for (double e : {0.1, 0.5, 1.0, 1.5, 1.9}) {
      if (std::abs(e - 1.0) >= alpha_star(p)) continue;
      s_gap = std::max(s_gap, std::abs(s_integral(e, p) - s_closed(e, p)));
    }
  }
  v.detail << "max |D integral - closed| = " << fmt(drift_gap) << ", max |S integral - closed| = "
           << fmt(s_gap);
  v.require(drift_gap <= 1e-9, "drift gap <= 1e-9");
  v.require(s_gap <= 1e-9, "S gap <= 1e-9");
}

void a2_critical_exponent(Verdict& v) {
  double worst = 0.0;
  for (double t : {kPi / 6, kPi / 3, kPi / 2, 2 * kPi / 3}) {
    worst = std::max(worst, alpha_star_verified(KernelParams(t)).gap);
  }
  v.detail << "max |bisected - (1 + theta/pi)| = " << fmt(worst);
  v.require(worst <= 1e-10, "gap <= 1e-10");
}

void a3_convergence_rate(Verdict& v) {
  const std::size_t n = 1000;
  const auto cfg = config(n);
  for (int m : {2, 3}) {
    const double predicted = m == 2 ? 1.0 / 3.0 : 0.5;
    for (Parity par : {Parity::EVEN, Parity::ODD}) {
      const auto prob = build_problem(m, par);
      const auto reference = solve_parity(prob, cfg, converge(1e-12)).fixed_point;
      const auto s = seed(prob, n);
      auto logs = log_coords(s).entries;
      for (std::size_t k = 0; k < n; ++k) logs[k] += 0.1 / static_cast<double>(k + 1);
      StopRule stop;
      stop.max_steps = 30;
      stop.target_residual = 0.0;
      const auto trace = iterate(EnergySequence::from_logs(logs, s.tail()), prob.q, prob.kernel, cfg, stop);
      const double rate = empirical_rate(trace, reference, 1.0, cfg.root_tol);
      v.detail << "M=" << m << " " << to_string(par) << ": " << fmt(rate) << " (predicted "
               << fmt(predicted) << "); ";
      v.require(std::abs(rate - predicted) <= 0.05,
                "M=" + std::to_string(m) + " " + std::string(to_string(par)) + " rate within 0.05");
    }
  }
}

void a4_spectrum_vs_oracle(Verdict& v) {
  for (int m : {2, 3}) {
    const auto reference = oracle::hamiltonian_eigs(m, 10, oracle::OracleConfig{});
    std::map<std::size_t, std::vector<double>> dev;
    for (std::size_t n : {500u, 1000u, 2000u}) {
      const auto r = solve_spectrum(m, config(n), converge(1e-10));
      for (std::size_t i = 0; i < 10; ++i) {
        dev[n].push_back(std::abs(r.energies[i] - reference[i]) / reference[i]);
      }
    }
    const double worst1000 = *std::max_element(dev[1000].begin(), dev[1000].end());
    v.detail << "M=" << m << ": max rel dev N=500/1000/2000 = "
             << fmt(*std::max_element(dev[500].begin(), dev[500].end())) << "/" << fmt(worst1000) << "/"
             << fmt(*std::max_element(dev[2000].begin(), dev[2000].end())) << "; ";
    v.require(worst1000 <= 1e-3, "M=" + std::to_string(m) + " N=1000 within 1e-3");
    for (std::size_t i = 0; i < 10; ++i) {
      v.require(dev[1000][i] <= dev[500][i] && dev[2000][i] <= dev[1000][i],
                "M=" + std::to_string(m) + " level " + std::to_string(i) + " non-increasing");
    }
  }
}

void a5_stochasticity(Verdict& v) {
  std::mt19937_64 rng(20240501);
  std::uniform_int_distribution<int> pick_m(2, 5);
  std::uniform_real_distribution<double> amp(-0.5, 0.5), decay(0.2, 2.0);
  double worst = 0.0;
  double min_entry = INFINITY;
  for (int point = 0; point < 20; ++point) {
    const auto prob = build_problem(pick_m(rng), point % 2 ? Parity::ODD : Parity::EVEN);
    const std::size_t n = 200;
    const auto s = seed(prob, n);
    auto logs = log_coords(s).entries;
    const double a = amp(rng), d = decay(rng);
    for (std::size_t k = 0; k < n; ++k) logs[k] += a * std::pow(static_cast<double>(k + 1), -d);
    const auto x = EnergySequence::from_logs(logs, s.tail());
    const auto cfg = config(n);
    const auto dt = dt_matrix(x, apply_T(x, prob.q, prob.kernel, cfg), prob.kernel, cfg);
    for (std::size_t i = 0; i < n; ++i) {
      double sum = dt.row_defect()[i];
      for (double e : dt.row(i)) {
        sum += e;
        min_entry = std::min(min_entry, e);
      }
      worst = std::max(worst, std::abs(sum - 1.0));
    }
  }
  v.detail << "max |row sum + defect - 1| = " << fmt(worst) << ", min entry = " << fmt(min_entry);
  v.require(worst <= 1e-12, "row sums within 1e-12");
  v.require(min_entry > 0.0, "entries positive");
}

void a6_operator_properties(Verdict& v) {
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<int> pick_m(2, 4);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> gauss;
  const std::size_t n = 60;
  const auto cfg = config(n);
  const double slack = 10 * cfg.root_tol;

  auto random_point = [&](const OscillatorProblem& prob) {
    const auto s = seed(prob, n);
    auto logs = log_coords(s).entries;
    const double a = 0.6 * (unit(rng) - 0.5), d = 0.3 + 1.5 * unit(rng);
    for (std::size_t k = 0; k < n; ++k) logs[k] += a * std::pow(static_cast<double>(k + 1), -d);
    return EnergySequence::from_logs(logs, s.tail());
  };
  auto problem = [&](int trial) { return build_problem(pick_m(rng), trial % 2 ? Parity::ODD : Parity::EVEN); };

  int fails[5] = {0, 0, 0, 0, 0};
  double worst_ratio[5] = {0, 0, 0, 0, 0};
  const int trials = 200;
  for (int t = 0; t < trials; ++t) {
    const auto prob = problem(t);
    const auto x = random_point(prob);
    const auto y = apply_T(x, prob.q, prob.kernel, cfg);

    // Dilatation equivariance.
    const double lambda = std::exp(std::log(0.1) + unit(rng) * std::log(100.0));
    const auto yl = apply_T(x.scaled(lambda), prob.q, prob.kernel, cfg);
    double eq_err = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      eq_err = std::max(eq_err, std::abs(std::log(yl[j] / y[j]) - std::log(lambda)));
    }
    worst_ratio[0] = std::max(worst_ratio[0], eq_err / slack);
    if (eq_err > slack) ++fails[0];

    // Order preservation and 1-Lipschitz on a random second point.
    auto logs = log_coords(x).entries;
    auto up = logs;
    auto other = logs;
    const double size = 0.5 * unit(rng);
    for (std::size_t k = 0; k < n; ++k) {
      up[k] += size * unit(rng);
      other[k] += size * (2 * unit(rng) - 1);
    }
    const auto yu = apply_T(EnergySequence::from_logs(up, x.tail()), prob.q, prob.kernel, cfg);
    bool ordered = true;
    for (std::size_t j = 0; j < n; ++j) ordered = ordered && y[j] <= yu[j] * (1 + slack);
    if (!ordered) ++fails[1];
    const auto xo = EnergySequence::from_logs(other, x.tail());
    const auto yo = apply_T(xo, prob.q, prob.kernel, cfg);
    const double lip = log_distance(yo, y) / log_distance(xo, x);
    worst_ratio[2] = std::max(worst_ratio[2], lip);
    if (log_distance(yo, y) > log_distance(xo, x) + slack) ++fails[2];

    // Weak contraction on a decaying perturbation.
    const auto dt = dt_matrix(x, y, prob.kernel, cfg);
    std::vector<double> dv(n);
    const double eps = 0.2 + 1.8 * unit(rng);
    for (std::size_t k = 0; k < n; ++k) {
      dv[k] = (unit(rng) < 0.5 ? -1.0 : 1.0) * std::pow(static_cast<double>(k + 1), -eps);
    }
    const WeightedNorm sup(0.0);
    const double contraction = sup(dt.apply(dv)) / sup(dv);
    worst_ratio[3] = std::max(worst_ratio[3], contraction);
    if (!(contraction < 1.0)) ++fails[3];

    // Second-order remainder.
    const double h = std::pow(10.0, -3.0 + 2.0 * unit(rng));
    std::vector<double> small(n);
    for (std::size_t k = 0; k < n; ++k) small[k] = h * gauss(rng) / std::sqrt(static_cast<double>(k + 1));
    auto shifted = logs;
    for (std::size_t k = 0; k < n; ++k) shifted[k] += small[k];
    const auto ys = apply_T(EnergySequence::from_logs(shifted, x.tail()), prob.q, prob.kernel, cfg);
    const auto lin = dt.apply(small);
    double rem = 0.0;
    for (std::size_t j = 0; j < n; ++j) rem = std::max(rem, std::abs(std::log(ys[j] / y[j]) - lin[j]));
    const double vn = sup(small);
    worst_ratio[4] = std::max(worst_ratio[4], rem / (vn * vn));
    if (rem > 4 * vn * vn + slack) ++fails[4];
  }
  const char* names[5] = {"equivariance", "order", "1-Lipschitz", "weak contraction", "second order"};
  const char* stats[5] = {"max err/slack", "", "max ratio", "max ratio", "max rem/|v|^2"};
  for (int i = 0; i < 5; ++i) {
    v.detail << names[i] << " " << (trials - fails[i]) << "/" << trials;
    if (*stats[i]) v.detail << " (" << stats[i] << " " << fmt(worst_ratio[i]) << ")";
    v.detail << "; ";
    v.require(fails[i] == 0, names[i]);
  }
}

void a7_brackets(Verdict& v) {
  const std::size_t n = 2000;
  const auto prob = build_problem(2, Parity::EVEN);
  const auto cfg = config(n);
  const auto up = verify_bracket(upper_bracket(100.0, n, prob.kernel), prob.q, prob.kernel, cfg,
                                 BracketKind::SUPER);
  const auto low = verify_bracket(lower_bracket(6, n, prob.kernel), prob.q, prob.kernel, cfg,
                                  BracketKind::SUB);
  v.detail << "SUPER(A=100) max violation " << fmt(up.max_violation) << " at k=" << up.worst_index
           << "; SUB(Nparam=6) max violation " << fmt(low.max_violation) << " at k=" << low.worst_index;
  v.require(up.verified, "upper bracket is SUPER");
  v.require(low.verified, "lower bracket is SUB");
}

void a8_drift(Verdict& v) {
  const std::size_t n = 2000;
  const auto prob = build_problem(2, Parity::EVEN);
  const auto cfg = config(n);
  const double amp = std::pow(2.0, prob.alpha) * prob.nu;
  for (double da : {-0.1, 0.1}) {
    const double a = prob.alpha + da;
    std::vector<double> values(n);
    for (std::size_t k = 1; k <= n; ++k) values[k - 1] = amp * std::pow(static_cast<double>(k), a);
    const EnergySequence x(values, TailModel(amp, a));
    const auto y = apply_T(x, prob.q, prob.kernel, cfg);
    const double predicted = std::pow(drift_closed(a, prob.kernel), -a);
    double worst = 0.0;
    for (std::size_t k = n / 2; k <= n; ++k) {
      worst = std::max(worst, std::abs(y.at(k) / x.at(k) / predicted - 1.0));
    }
    v.detail << "alpha=" << fmt(a) << ": D^-alpha=" << fmt(predicted) << ", max rel dev on [N/2,N] "
             << fmt(worst) << "; ";
    v.require(worst <= 0.05, "alpha=" + fmt(a) + " within 5%");
  }
}

void a9_spectral_rate(Verdict& v) {
  const std::size_t n = 1000;
  const auto cfg = config(n);
  const double target = 1.0 / 3.0;
  for (Parity par : {Parity::EVEN, Parity::ODD}) {
    const auto prob = build_problem(2, par);
    const auto fp = solve_parity(prob, cfg, converge(1e-12)).fixed_point;
    const auto dt = dt_matrix(fp, apply_T(fp, prob.q, prob.kernel, cfg), prob.kernel, cfg);
    const double rate = spectral_rate_estimate(dt, 1.0, 40);
    v.detail << to_string(par) << ": " << fmt(rate) << " (target 1/3, rel dev "
             << fmt(std::abs(rate / target - 1.0)) << "); ";
    v.require(std::abs(rate / target - 1.0) <= 0.10, std::string(to_string(par)) + " within 10%");
  }
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> all = {
      {"A1", "closed forms vs quadrature", 10, a1_closed_forms},
      {"A2", "critical exponent", 10, a2_critical_exponent},
      {"A3", "convergence rate", 120, a3_convergence_rate},
      {"A4", "spectrum vs oracle", 600, a4_spectrum_vs_oracle},
      {"A5", "stochasticity of DT", 60, a5_stochasticity},
      {"A6", "operator properties", 300, a6_operator_properties},
      {"A7", "brackets", 60, a7_brackets},
      {"A8", "drift off criticality", 60, a8_drift},
      {"A9", "spectral rate of DT", 120, a9_spectral_rate},
  };
  std::vector<std::string> wanted(argv + 1, argv + argc);
  int failures = 0;
  for (const auto& c : all) {
    if (!wanted.empty() && std::find(wanted.begin(), wanted.end(), c.id) == wanted.end()) continue;
    Verdict v;
    const auto start = std::chrono::steady_clock::now();
    try {
      c.body(v);
    } catch (const std::exception& e) {
      v.require(false, std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    v.require(secs <= c.budget_seconds, "runtime budget " + fmt(c.budget_seconds) + " s");
    std::string detail = v.detail.str();
    while (!detail.empty() && (detail.back() == ' ' || detail.back() == ';')) detail.pop_back();
    std::string failed;
    for (const auto& w : v.violations) failed += (failed.empty() ? " | failed: " : ", ") + w;
    std::printf("%s %s %s: %s (%.1f s)%s\n", c.id.c_str(), v.pass ? "PASS" : "FAIL", c.title.c_str(),
                detail.c_str(), secs, failed.c_str());
    std::fflush(stdout);
    if (!v.pass) ++failures;
  }
  return failures == 0 ? 0 : 1;
}
