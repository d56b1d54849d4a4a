// Acceptance checks AC1–AC12. One PASS/FAIL line per criterion; the exit
// status is nonzero when any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "nnrates/boundary.hpp"
#include "nnrates/bounds.hpp"
#include "nnrates/cli.hpp"
#include "nnrates/harness.hpp"
#include "nnrates/parallel.hpp"
#include "nnrates/presets.hpp"

using namespace nnrates;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

// Per-trial mistake probabilities from the harness seed streams.
struct MeanSe {
  double mean = 0.0;
  double se = 0.0;
};

MeanSe mean_mistake(const DistributionInstance& dist, std::size_t n, std::size_t k, std::size_t trials,
                    std::uint64_t seed) {
  const auto v = parallel_map<double>(trials, [&](std::size_t t) {
    return trial_mistake(dist, n, k, trial_seed(seed, n, t, 0), QueryMode::Auto, 0, trial_seed(seed, n, t, 1)).value;
  });
  double mean = 0.0, m2 = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double d = v[i] - mean;
    mean += d / static_cast<double>(i + 1);
    m2 += d * (v[i] - mean);
  }
  const double var = trials > 1 ? m2 / static_cast<double>(trials - 1) : 0.0;
  return {mean, std::sqrt(var / static_cast<double>(trials))};
}

DistributionInstance random_atomic(std::uint64_t seed, std::size_t m) {
  Rng rng(seed);
  std::vector<double> xs(m), mass(m), eta(m);
  double total = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    xs[i] = static_cast<double>(i) + 0.5 * rng.uniform();
    mass[i] = 0.1 + rng.uniform();
    eta[i] = rng.uniform();
    total += mass[i];
  }
  for (double& w : mass) w /= total;
  std::vector<double> d(m * m);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j) d[i * m + j] = std::abs(xs[i] - xs[j]);
  return DistributionInstance::finite_atomic(MetricSpace::finite(DistanceMatrix(m, std::move(d))), mass, eta);
}

Outcome ac1() {
  const std::vector<DistributionInstance> fams = {random_atomic(11, 12), presets::disjoint_support(),
                                                  DistributionInstance::power_margin(1.0)};
  double worst = 1.0;
  Rng rng(2024);
  for (const auto& d : fams) {
    for (int i = 0; i < 100; ++i) {
      const Point x = d.sample_point(rng);
      for (int j = 1; j <= 99; ++j) {
        const double p = j / 100.0;
        worst = std::min(worst, d.ball_mass(x, d.prob_radius(x, p), BallKind::Closed).value - p);
      }
    }
  }
  return {worst >= -1e-9, fmt("min mu(B(x,r_p)) - p = %.3g over 3 families x 100 x x 99 p", worst)};
}

Outcome ac2() {
  const auto d = presets::disjoint_support();
  double grid[10][10];
  double err = 0.0;
  for (int i = 0; i < 10; ++i)
    for (int j = 0; j < 10; ++j) {
      const auto m = boundary_measure(d, 0.05 * (i + 1), 0.05 * (j + 1));
      grid[i][j] = m.value;
      err = std::max(err, m.error_bound);
    }
  bool monotone = true;
  for (int i = 0; i < 10; ++i)
    for (int j = 0; j < 10; ++j) {
      if (i > 0 && grid[i][j] < grid[i - 1][j] - 2 * err) monotone = false;
      if (j > 0 && grid[i][j] < grid[i][j - 1] - 2 * err) monotone = false;
    }
  double worst = 0.0;
  for (int c = 0; c < 20; ++c) {
    const int i = (c * 7) % 10, j = (c * 3 + c / 10) % 10;
    const double p = 0.05 * (i + 1), delta = 0.05 * (j + 1);
    worst = std::max(worst, std::abs(grid[i][j] - 2 * delta * p));
  }
  return {monotone && worst <= 1e-9,
          fmt("monotone=%d on 10x10, max |mu - 2*Delta*p| = %.3g at 20 points", monotone, worst)};
}

Outcome ac3() {
  const auto two = presets::two_pure_atoms();
  const std::size_t trials = 200000;
  struct Case {
    std::size_t n, k;
    double want;
  };
  bool ok = true;
  std::string detail;
  for (const Case c : {Case{1, 1, 0.5}, Case{3, 1, 0.125}, Case{3, 3, 0.5}}) {
    const double exact = exact_expected_mistake(two, c.n, c.k);
    const MeanSe mc = mean_mistake(two, c.n, c.k, trials, 77);
    const double z = mc.se > 0 ? std::abs(mc.mean - c.want) / mc.se : (mc.mean == c.want ? 0.0 : INFINITY);
    ok &= z <= 3.0 && std::abs(exact - c.want) < 1e-12;
    detail += fmt("(n=%zu,k=%zu) mc=%.5f se=%.2g exact=%.6g z=%.2f; ", c.n, c.k, mc.mean, mc.se, exact, z);
  }
  return {ok, detail};
}

Outcome ac4() {
  TrialConfig cfg;
  cfg.n = 10000;
  cfg.k = 100;
  cfg.delta = 0.1;
  cfg.trials = 500;
  cfg.master_seed = 4;
  const TrialReport r = run_upper_bound_trials(presets::disjoint_support(), cfg);
  return {r.wilson.hi <= 0.1 + 0.03,
          fmt("bound=%.6f violations=%zu/500 wilson=[%.4f, %.4f] (limit 0.13)", r.rows.front().bound, r.violations,
              r.wilson.lo, r.wilson.hi)};
}

Outcome ac5() {
  LowerBoundBudget b;
  const LowerBoundCheck c = run_lower_bound_check(presets::disjoint_support(), 10000, 100, b, 5);
  const bool constants = std::abs(c.c_o - 0.0030329) < 5e-7 && std::abs(c.high_error_mass - 0.002) < 1e-9;
  return {c.precision_met && constants && c.lhs >= c.rhs,
          fmt("lhs=%.4g se=%.3g rhs=%.4g (c_o=%.7f, mu(E)=%.6g) trials=%zu se<=rhs/10: %d", c.lhs, c.lhs_stderr, c.rhs,
              c.c_o, c.high_error_mass, c.trials, c.precision_met)};
}

Outcome ac6() {
  ExcessConfig cfg;
  cfg.trials = 100;
  cfg.master_seed = 6;
  const RateSweep r = rate_sweep(DistributionInstance::power_margin(1.0), {500, 1500, 5000, 15000, 50000},
                                 KRule::power(2.0 / 3.0), cfg);
  std::string means;
  for (const auto& p : r.points) means += fmt("%zu:%.3g ", p.n, p.mean_excess);
  return {!r.degenerate && r.fitted == 5 && r.slope >= -0.82 && r.slope <= -0.52,
          fmt("slope=%.4f (window [-0.82, -0.52]) means ", r.slope) + means};
}

Outcome ac7() {
  const auto d = presets::gapped_two_level();
  const SmoothnessSpec s{1.0, 0.5};
  // the (α, L) pair used below must hold for this instance
  std::vector<SmoothnessProbe> probes;
  for (int i = 0; i <= 200; ++i)
    for (int j = 1; j <= 100; ++j) probes.push_back({i / 200.0, j / 100.0});
  const bool certified = !smoothness_audit(d, s.alpha, s.L, probes) && margin_mass(d, 0.4 - 1e-9) == 0.0;
  bool ok = certified;
  std::string detail = fmt("smoothness certified=%d; ", certified);
  for (std::size_t n : {250, 500, 1000}) {
    const ExponentialRegime e = exponential_regime(0.4, s, n);
    const MeanSe m = mean_mistake(d, n, e.k, 200, 7);
    const double limit = 2 * std::exp(-e.C_o * static_cast<double>(n));
    ok &= m.mean <= limit + 3 * m.se;
    detail += fmt("n=%zu k=%zu mean=%.3g se=%.2g bound=%.4g; ", n, e.k, m.mean, m.se, limit);
  }
  return {ok, detail};
}

Outcome ac8() {
  TrialConfig cfg;
  cfg.n = 200;
  cfg.k = 1;
  cfg.delta = 0.1;
  cfg.trials = 500;
  cfg.master_seed = 8;
  const TrialReport r = run_zero_bayes_trials(presets::disjoint_support(), cfg);
  bool increasing = true;
  for (std::size_t k = 2; k <= 50; ++k) increasing &= zero_bayes_params(200, k, 0.1) > zero_bayes_params(200, k - 1, 0.1);
  return {r.wilson.hi <= 0.1 + 0.03 && increasing,
          fmt("p=%.6f violations=%zu/500 wilson_hi=%.4f (limit 0.13); p strictly increasing in k<=50: %d", r.p,
              r.violations, r.wilson.hi, increasing)};
}

Outcome ac9() {
  std::size_t checked = 0, failures = 0;
  for (std::uint64_t n = 1; n <= 60; ++n)
    for (int qi = 1; qi <= 10; ++qi) {
      const double q = 0.05 * qi;
      for (std::uint64_t l = 0; l <= n; ++l) {
        const SludBound s = slud_bound(n, q, l);
        if (s.clause == SludClause::Inapplicable) continue;
        ++checked;
        failures += binomial_tail(n, q, l, TailDirection::GreaterEqual) < s.bound;
      }
    }
  std::size_t median_checked = 0, median_failures = 0;
  for (std::uint64_t n = 2; n <= 60; ++n)
    for (std::uint64_t k = 1; k < n; ++k) {
      ++median_checked;
      median_failures += binomial_tail(n, static_cast<double>(k) / n, k + 1, TailDirection::GreaterEqual) > 0.5;
    }
  return {failures == 0 && median_failures == 0,
          fmt("slud: %zu/%zu cases sound; median fact: %zu/%zu", checked - failures, checked,
              median_checked - median_failures, median_checked)};
}

Outcome ac10() {
  const auto pm = DistributionInstance::power_margin(1.0);
  const SmoothnessSpec s{1.0, 0.5};
  std::vector<SmoothnessProbe> audit;
  for (int i = 0; i <= 200; ++i)
    for (int j = 1; j <= 100; ++j) audit.push_back({i / 200.0, j / 100.0});
  const bool certified = !smoothness_audit(pm, s.alpha, s.L, audit);

  std::size_t upper_checked = 0, upper_bad = 0, lower_checked = 0, lower_bad = 0;
  const int probes = 1000;
  for (double p : {0.01, 0.05, 0.2})
    for (double delta : {0.0, 0.1, 0.3})
      for (int i = 0; i < probes; ++i) {
        const double x = (i + 0.5) / probes;
        const Thresholds t = smooth_thresholds(s, p, delta, 1, 1);
        if (region_classify(pm, x, p, delta).verdict != Region::Boundary) continue;
        ++upper_checked;
        upper_bad += std::abs(pm.eta_point(x) - 0.5) > t.upper_band + 1e-9;
      }
  for (auto [n, k] : {std::pair<std::size_t, std::size_t>{100000, 100}, {1000000, 400}, {20000, 25}})
    for (int i = 0; i < probes; ++i) {
      const double x = (i + 0.5) / probes;
      const double gap = std::abs(pm.eta_point(x) - 0.5);
      const Thresholds t = smooth_thresholds(s, 0.0, 0.0, n, k);
      if (!(gap > 0.0 && gap <= t.lower_band)) continue;
      ++lower_checked;
      lower_bad += !high_error_classify(pm, x, n, k).verdict;
    }
  return {certified && upper_bad == 0 && lower_bad == 0 && upper_checked > 0 && lower_checked > 0,
          fmt("(1, 1/2) certified=%d; boundary probes within upper band %zu/%zu; band probes in E %zu/%zu", certified,
              upper_checked - upper_bad, upper_checked, lower_checked - lower_bad, lower_checked)};
}

Outcome ac11() {
  ExcessConfig cfg;
  cfg.trials = 100;
  cfg.master_seed = 11;
  const ConsistencySweep c =
      consistency_sweep(DistributionInstance::power_margin(1.0), {100, 1000, 10000}, KRule::sqrt_n(), cfg);
  const double last = c.points.back().median_excess;
  std::string medians;
  for (const auto& p : c.points) medians += fmt("%zu:%.4g ", p.n, p.median_excess);
  return {c.strictly_decreasing && last <= 0.05,
          fmt("strictly decreasing=%d final=%.4g (limit 0.05) medians ", c.strictly_decreasing, last) + medians};
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Outcome ac12() {
  const fs::path dir = fs::temp_directory_path() / "nnrates_acceptance_ac12";
  fs::remove_all(dir);
  fs::create_directories(dir);
  {
    std::ofstream cfg(dir / "config.json");
    cfg << R"({
  "distribution": {"family": "power_margin", "gamma": 1.0},
  "seed": 12,
  "experiments": [
    {"type": "upper_bound", "name": "ub_mc", "n": 2000, "k": 60, "delta": 0.1, "trials": 40, "mc_points": 500, "query": "monte_carlo"},
    {"type": "upper_bound", "name": "ub", "n": 2000, "k": 60, "delta": 0.1, "trials": 40},
    {"type": "expected_excess", "name": "excess", "n": [300, 3000], "k_rule": {"kind": "sqrt"}, "trials": 30, "mc_points": 300, "query": "monte_carlo"},
    {"type": "rate_sweep", "name": "rate", "n_grid": [500, 1000, 2000, 4000], "k_rule": {"kind": "power", "exponent": 0.6667}, "trials": 20},
    {"type": "consistency", "name": "cons", "n_grid": [100, 1000], "k_rule": {"kind": "sqrt"}, "trials": 20},
    {"type": "lower_bound", "name": "lb", "n": 1000, "k": 30, "batch": 100, "min_trials": 300, "max_trials": 300, "query": "monte_carlo", "mc_points": 200}
  ]
})";
  }
  const char* names[] = {"ub_mc.csv", "ub.csv", "excess.csv", "rate.csv", "cons.csv", "lb.csv"};
  auto run = [&](const char* workers, const std::string& out) {
    setenv("NNRATES_WORKERS", workers, 1);
    std::ostringstream o, e;
    const int code =
        run_cli({"run", (dir / "config.json").string(), "--output_dir", (dir / out).string()}, o, e);
    unsetenv("NNRATES_WORKERS");
    return code;
  };
  const int c1 = run("1", "w1"), c2 = run("4", "w4"), c3 = run("1", "again");
  bool same = c1 == 0 && c2 == 0 && c3 == 0;
  std::size_t bytes = 0;
  for (const char* f : names) {
    const std::string a = read_file(dir / "w1" / f);
    bytes += a.size();
    same &= !a.empty() && a == read_file(dir / "w4" / f) && a == read_file(dir / "again" / f);
  }
  fs::remove_all(dir);
  return {same, fmt("6 reports (%zu bytes) identical across workers=1, workers=4 and a rerun", bytes)};
}

}  // namespace

int main() {
  struct Criterion {
    const char* id;
    const char* title;
    Outcome (*fn)();
    double budget_s;  // stated runtime limit; 0 = none
  };
  const Criterion criteria[] = {
      {"AC1", "probability-radius law", ac1, 10},
      {"AC2", "boundary nesting and closed form", ac2, 0},
      {"AC3", "classifier-oracle equivalence", ac3, 60},
      {"AC4", "upper bound holds", ac4, 300},
      {"AC5", "lower bound holds", ac5, 600},
      {"AC6", "margin rate slope", ac6, 1200},
      {"AC7", "exponential regime", ac7, 0},
      {"AC8", "zero-Bayes bound", ac8, 0},
      {"AC9", "Slud soundness and binomial median", ac9, 30},
      {"AC10", "smoothness translation", ac10, 10},
      {"AC11", "consistency trend", ac11, 0},
      {"AC12", "determinism", ac12, 0},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.fn();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = c.budget_s == 0 || secs <= c.budget_s;
    const bool pass = o.pass && in_time;
    failed += !pass;
    std::printf("%s %s %s: %s [%.1fs%s]\n", pass ? "PASS" : "FAIL", c.id, c.title, o.detail.c_str(), secs,
                c.budget_s > 0 ? fmt(" of %.0fs", c.budget_s).c_str() : "");
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(std::size(criteria)) - failed, std::size(criteria));
  return failed == 0 ? 0 : 1;
}
