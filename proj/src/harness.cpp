#include "nnrates/harness.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <sstream>

#include "nnrates/boundary.hpp"
#include "nnrates/bounds.hpp"
#include "nnrates/errors.hpp"
#include "nnrates/parallel.hpp"
#include "nnrates/rng.hpp"

namespace nnrates {

namespace {

std::size_t ceil_power(double n, double a) {
  const double v = std::pow(n, a);
  const double r = std::round(v);
  // n^a that should be an integer (1000^{2/3}) must not round up past it.
  if (std::abs(v - r) <= 1e-9 * std::max(1.0, v)) return static_cast<std::size_t>(r);
  return static_cast<std::size_t>(std::ceil(v));
}

}  // namespace

std::size_t KRule::k_for(std::size_t n) const {
  const double nd = static_cast<double>(n);
  std::size_t k = 0;
  switch (kind) {
    case Kind::Fixed: k = fixed; break;
    case Kind::Power:
      if (!(exponent > 0.0 && exponent < 1.0)) throw ArgumentError("k rule exponent must lie in (0,1)");
      k = ceil_power(nd, exponent);
      break;
    case Kind::Sqrt: k = ceil_power(nd, 0.5); break;
    case Kind::Theorem4: {
      if (!(alpha > 0.0) || !(k_o > 0.0)) throw ArgumentError("theorem4 k rule needs α, k_o > 0");
      const double denom = 2.0 * alpha + 1.0;
      double v = k_o * std::pow(nd, 2.0 * alpha / denom);
      if (delta) {
        if (!(*delta > 0.0 && *delta < 1.0)) throw ArgumentError("theorem4 k rule: δ must lie in (0,1)");
        v *= std::pow(std::log(1.0 / *delta), 1.0 / denom);
      }
      k = static_cast<std::size_t>(std::max(1.0, std::round(v)));
      break;
    }
  }
  if (k < 1 || k >= n) {
    throw ArgumentError("k rule " + describe() + " gives k=" + std::to_string(k) + " for n=" +
                        std::to_string(n) + "; need 1 <= k < n");
  }
  return k;
}

std::string KRule::describe() const {
  std::ostringstream os;
  switch (kind) {
    case Kind::Fixed: os << "fixed(" << fixed << ")"; break;
    case Kind::Power: os << "ceil(n^" << exponent << ")"; break;
    case Kind::Sqrt: os << "ceil(sqrt(n))"; break;
    case Kind::Theorem4:
      os << "theorem4(k_o=" << k_o << ",alpha=" << alpha;
      if (delta) os << ",delta=" << *delta;
      os << ")";
      break;
  }
  return os.str();
}

std::uint64_t trial_seed(std::uint64_t master_seed, std::size_t n, std::size_t trial,
                         std::uint64_t stream) {
  return derive_seed(derive_seed(master_seed, n), trial, stream);
}

Interval wilson_interval(std::size_t successes, std::size_t trials) {
  if (trials == 0) throw ArgumentError("Wilson interval needs at least one trial");
  constexpr double z = 1.959963984540054;
  const double t = static_cast<double>(trials);
  const double phat = static_cast<double>(successes) / t;
  const double denom = 1.0 + z * z / t;
  const double center = (phat + z * z / (2.0 * t)) / denom;
  const double half = z * std::sqrt(phat * (1.0 - phat) / t + z * z / (4.0 * t * t)) / denom;
  // the endpoints are exactly 0 and 1 at the extremes; rounding would leave ~1e-19
  const double lo = successes == 0 ? 0.0 : std::max(0.0, center - half);
  const double hi = successes == trials ? 1.0 : std::min(1.0, center + half);
  return {lo, hi};
}

namespace {

RiskIntegrals trial_integrals(const DistributionInstance& dist, std::size_t n, std::size_t k,
                              std::uint64_t seed, QueryMode query, std::size_t mc_points,
                              std::uint64_t query_seed) {
  if (query == QueryMode::Auto && dist.is_interval()) {
    IntervalDraws d = dist.sample_interval(seed, n);
    sort_draws(d);
    const SweepResult r = sweep_interval(dist.interval(), d.location, d.label, k);
    return {{r.mistake, 0.0}, {r.excess, 0.0}};
  }
  const TrainedModel model = fit(dist.space(), dist.sample_labeled(seed, n));
  const QueryMethod method = query == QueryMode::Auto
                                 ? QueryMethod::exact()
                                 : QueryMethod::monte_carlo(mc_points, query_seed, 1);
  return risk_integrals(dist, model, k, method);
}

TrialReport run_bound_trials(const DistributionInstance& dist, const TrialConfig& cfg, double bound) {
  if (cfg.trials < 1) throw ArgumentError("trials must be >= 1");
  if (cfg.k < 1 || cfg.k >= cfg.n) throw ArgumentError("need 1 <= k < n");
  TrialReport report;
  report.rows = parallel_map<TrialRow>(
      cfg.trials,
      [&](std::size_t t) {
        TrialRow row;
        row.trial = t;
        row.n = cfg.n;
        row.k = cfg.k;
        row.delta = cfg.delta;
        row.bound = bound;
        row.mistake_prob = trial_mistake(dist, cfg.n, cfg.k, trial_seed(cfg.master_seed, cfg.n, t, 0),
                                         cfg.query, cfg.mc_points,
                                         trial_seed(cfg.master_seed, cfg.n, t, 1))
                               .value;
        row.violated = row.mistake_prob > bound;
        return row;
      },
      cfg.workers);
  for (const auto& r : report.rows) report.violations += r.violated ? 1 : 0;
  report.frequency = static_cast<double>(report.violations) / static_cast<double>(cfg.trials);
  report.wilson = wilson_interval(report.violations, cfg.trials);
  return report;
}

}  // namespace

MassQueryResult trial_mistake(const DistributionInstance& dist, std::size_t n, std::size_t k,
                              std::uint64_t seed, QueryMode query, std::size_t mc_points,
                              std::uint64_t query_seed) {
  return trial_integrals(dist, n, k, seed, query, mc_points, query_seed).mistake;
}

TrialReport run_upper_bound_trials(const DistributionInstance& dist, const TrialConfig& cfg) {
  const TheoremOneParams t = theorem1_params(cfg.n, cfg.k, cfg.delta);
  const ClampedBound bound = misclassification_upper_bound(dist, cfg.n, cfg.k, cfg.delta);
  TrialReport report = run_bound_trials(dist, cfg, bound.raw);
  report.p = t.p;
  report.Delta = t.Delta;
  return report;
}

TrialReport run_zero_bayes_trials(const DistributionInstance& dist, const TrialConfig& cfg) {
  const double p = zero_bayes_params(cfg.n, cfg.k, cfg.delta);
  double bound = cfg.delta + 1.0;
  if (p <= 1.0) {
    const MassQueryResult b = boundary_measure(dist, p, 0.5);
    bound = cfg.delta + b.value + b.error_bound;
  }
  TrialReport report = run_bound_trials(dist, cfg, bound);
  report.p = p;
  report.Delta = 0.5;
  return report;
}

// ---------------------------------------------------------------------------
// Exact oracle

namespace {

double log_choose(double n, double r) {
  return std::lgamma(n + 1.0) - std::lgamma(r + 1.0) - std::lgamma(n - r + 1.0);
}

// dist ← dist ⊛ Bin(m, q); sums never exceed k, so the size stays k + 1.
void convolve_binomial(std::vector<double>& dist, std::size_t m, double q) {
  for (std::size_t draw = 0; draw < m; ++draw) {
    for (std::size_t s = dist.size(); s-- > 0;) {
      const double carry = s > 0 ? dist[s - 1] * q : 0.0;
      dist[s] = dist[s] * (1.0 - q) + carry;
    }
  }
}

}  // namespace

double occupancy_state_count(std::size_t atoms, std::size_t n) {
  if (atoms == 0) return 0.0;
  return std::round(std::exp(log_choose(static_cast<double>(n + atoms - 1), static_cast<double>(atoms - 1))));
}

double exact_expected_mistake(const DistributionInstance& dist, std::size_t n, std::size_t k,
                              std::size_t max_states) {
  if (dist.family() != Family::FiniteAtomic) {
    throw UnsupportedError("exact_expected_mistake needs a finite_atomic distribution");
  }
  if (k < 1 || k > n) throw ArgumentError("need 1 <= k <= n");
  const AtomicModel& a = dist.atomic();
  const std::size_t m = a.mass.size();
  const double states = occupancy_state_count(m, n);
  if (states > static_cast<double>(max_states)) {
    throw ResourceError("occupancy enumeration has ~" + std::to_string(static_cast<long long>(states)) +
                        " states, limit " + std::to_string(max_states));
  }

  // Atoms around each query atom, grouped into shells of equal distance.
  std::vector<std::vector<std::vector<std::size_t>>> shells(m);
  for (std::size_t i = 0; i < m; ++i) {
    std::vector<std::size_t> order(m);
    std::iota(order.begin(), order.end(), 0);
    auto d = [&](std::size_t j) { return dist.space().distance(AtomId{i}, AtomId{j}); };
    std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return d(x) < d(y); });
    for (std::size_t pos = 0; pos < m; ++pos) {
      if (pos == 0 || d(order[pos]) != d(order[pos - 1])) shells[i].emplace_back();
      shells[i].back().push_back(order[pos]);
    }
  }

  std::vector<double> log_mass(m);
  for (std::size_t j = 0; j < m; ++j) log_mass[j] = a.mass[j] > 0.0 ? std::log(a.mass[j]) : -INFINITY;

  // Pr(label sum over the k nearest ≥ k/2) given counts c, for query atom i.
  auto vote_one = [&](const std::vector<std::size_t>& c, std::size_t i) {
    std::vector<double> sum_dist(k + 1, 0.0);
    sum_dist[0] = 1.0;
    std::size_t remaining = k;
    for (const auto& shell : shells[i]) {
      if (remaining == 0) break;
      std::size_t total = 0;
      for (std::size_t j : shell) total += c[j];
      if (total == 0) continue;
      if (total <= remaining) {
        for (std::size_t j : shell) convolve_binomial(sum_dist, c[j], a.eta[j]);
        remaining -= total;
        continue;
      }
      // The shell is cut: which of its points are used is decided by z, so the
      // per-atom counts taken are multivariate hypergeometric.
      std::vector<double> mixed(k + 1, 0.0);
      const double log_total = log_choose(static_cast<double>(total), static_cast<double>(remaining));
      std::vector<std::size_t> take(shell.size(), 0);
      std::function<void(std::size_t, std::size_t)> alloc = [&](std::size_t idx, std::size_t left) {
        if (idx + 1 == shell.size()) {
          if (left > c[shell[idx]]) return;
          take[idx] = left;
          double lw = -log_total;
          for (std::size_t t = 0; t < shell.size(); ++t) {
            lw += log_choose(static_cast<double>(c[shell[t]]), static_cast<double>(take[t]));
          }
          std::vector<double> part = sum_dist;
          for (std::size_t t = 0; t < shell.size(); ++t) convolve_binomial(part, take[t], a.eta[shell[t]]);
          const double w = std::exp(lw);
          for (std::size_t s = 0; s <= k; ++s) mixed[s] += w * part[s];
          return;
        }
        for (std::size_t t = 0; t <= std::min(left, c[shell[idx]]); ++t) {
          take[idx] = t;
          alloc(idx + 1, left - t);
        }
      };
      alloc(0, remaining);
      sum_dist = std::move(mixed);
      remaining = 0;
    }
    double p1 = 0.0;
    for (std::size_t s = 0; s <= k; ++s) {
      if (2 * s >= k) p1 += sum_dist[s];
    }
    return p1;
  };

  double total = 0.0;
  std::vector<std::size_t> c(m, 0);
  const double log_nfact = std::lgamma(static_cast<double>(n) + 1.0);
  std::function<void(std::size_t, std::size_t, double)> enumerate = [&](std::size_t j, std::size_t left,
                                                                        double lw) {
    if (j + 1 == m) {
      c[j] = left;
      if (left > 0 && a.mass[j] <= 0.0) return;
      const double w = std::exp(lw + (left > 0 ? static_cast<double>(left) * log_mass[j] : 0.0) -
                                std::lgamma(static_cast<double>(left) + 1.0));
      if (w == 0.0) return;
      double mistake = 0.0;
      for (std::size_t i = 0; i < m; ++i) {
        if (a.mass[i] <= 0.0) continue;
        const double p1 = vote_one(c, i);
        mistake += a.mass[i] * (a.eta[i] >= 0.5 ? 1.0 - p1 : p1);
      }
      total += w * mistake;
      return;
    }
    for (std::size_t cj = 0; cj <= left; ++cj) {
      if (cj > 0 && a.mass[j] <= 0.0) break;
      c[j] = cj;
      const double term = (cj > 0 ? static_cast<double>(cj) * log_mass[j] : 0.0) -
                          std::lgamma(static_cast<double>(cj) + 1.0);
      enumerate(j + 1, left - cj, lw + term);
    }
  };
  enumerate(0, n, log_nfact);
  return std::min(1.0, std::max(0.0, total));
}

// ---------------------------------------------------------------------------

LowerBoundCheck run_lower_bound_check(const DistributionInstance& dist, std::size_t n,
                                      std::size_t k, const LowerBoundBudget& budget,
                                      std::uint64_t master_seed) {
  LowerBoundCheck out;
  out.c_o = lower_bound_constants(k).c_o;
  out.high_error_mass = high_error_measure(dist, n, k).value;
  out.rhs = out.c_o * out.high_error_mass;

  if (dist.family() == Family::FiniteAtomic) {
    try {
      out.lhs = exact_expected_mistake(dist, n, k);
      out.exact = true;
      out.precision_met = true;
      out.pass = out.lhs >= out.rhs;
      return out;
    } catch (const ResourceError&) {
      // fall through to simulation
    }
  }
  if (budget.batch < 1 || budget.max_trials < 1) throw ArgumentError("lower-bound budget must be positive");

  // Welford accumulation in trial order keeps the result independent of the
  // worker count.
  double mean = 0.0, m2 = 0.0;
  std::size_t done = 0;
  auto stderr_now = [&] {
    return done > 1 ? std::sqrt(m2 / static_cast<double>(done - 1) / static_cast<double>(done)) : INFINITY;
  };
  while (done < budget.max_trials) {
    const std::size_t count = std::min(budget.batch, budget.max_trials - done);
    const auto values = parallel_map<double>(
        count,
        [&](std::size_t i) {
          const std::size_t t = done + i;
          return trial_mistake(dist, n, k, trial_seed(master_seed, n, t, 0), budget.query,
                               budget.mc_points, trial_seed(master_seed, n, t, 1))
              .value;
        },
        budget.workers);
    for (double v : values) {
      ++done;
      const double d = v - mean;
      mean += d / static_cast<double>(done);
      m2 += d * (v - mean);
    }
    if (done >= budget.min_trials && (out.rhs == 0.0 || stderr_now() <= out.rhs / 10.0)) break;
  }
  out.lhs = mean;
  out.lhs_stderr = done > 1 ? stderr_now() : 0.0;
  out.trials = done;
  out.precision_met = out.rhs == 0.0 || out.lhs_stderr <= out.rhs / 10.0;
  out.pass = out.lhs >= out.rhs - 3.0 * out.lhs_stderr;
  return out;
}

namespace {

ExcessEstimate summarize(std::vector<double> values) {
  ExcessEstimate e;
  const double t = static_cast<double>(values.size());
  double mean = 0.0, m2 = 0.0;
  std::size_t i = 0;
  for (double v : values) {
    ++i;
    const double d = v - mean;
    mean += d / static_cast<double>(i);
    m2 += d * (v - mean);
  }
  e.mean = mean;
  e.stderr_ = values.size() > 1 ? std::sqrt(m2 / (t - 1.0) / t) : 0.0;
  e.per_trial = std::move(values);
  return e;
}

}  // namespace

ExcessEstimate estimate_expected_excess(const DistributionInstance& dist, std::size_t n,
                                        std::size_t k, const ExcessConfig& cfg) {
  if (cfg.trials < 1) throw ArgumentError("trials must be >= 1");
  if (k < 1 || k > n) throw ArgumentError("need 1 <= k <= n");
  auto values = parallel_map<double>(
      cfg.trials,
      [&](std::size_t t) {
        return trial_integrals(dist, n, k, trial_seed(cfg.master_seed, n, t, 0), cfg.query, cfg.mc_points,
                               trial_seed(cfg.master_seed, n, t, 1))
            .excess.value;
      },
      cfg.workers);
  return summarize(std::move(values));
}

ExcessEstimate estimate_pointwise_excess(const DistributionInstance& dist, const Point& x,
                                         std::size_t n, std::size_t k, const ExcessConfig& cfg) {
  if (cfg.trials < 1) throw ArgumentError("trials must be >= 1");
  if (!dist.space().contains(x)) throw DomainError("query point outside the space");
  auto values = parallel_map<double>(
      cfg.trials,
      [&](std::size_t t) {
        const TrainedModel model = fit(dist.space(), dist.sample_labeled(trial_seed(cfg.master_seed, n, t, 0), n));
        return conditional_risk(dist, model, k, x).excess;
      },
      cfg.workers);
  return summarize(std::move(values));
}

LineFit least_squares(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw ArgumentError("least squares needs >= 2 paired points");
  const double m = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / m;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / m;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (!(sxx > 0.0)) throw ArgumentError("least squares needs distinct x values");
  LineFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  return f;
}

RateSweep rate_sweep(const DistributionInstance& dist, const std::vector<std::size_t>& n_grid,
                     const KRule& rule, const ExcessConfig& cfg) {
  if (n_grid.size() < 4) throw ArgumentError("rate sweep needs at least 4 sample sizes");
  RateSweep out;
  std::vector<double> lx, ly;
  for (std::size_t n : n_grid) {
    RatePoint pt;
    pt.n = n;
    pt.k = rule.k_for(n);
    const ExcessEstimate e = estimate_expected_excess(dist, n, pt.k, cfg);
    pt.mean_excess = e.mean;
    pt.stderr_ = e.stderr_;
    pt.excluded = !(e.mean > 0.0);
    if (!pt.excluded) {
      lx.push_back(std::log(static_cast<double>(n)));
      ly.push_back(std::log(e.mean));
    }
    out.points.push_back(pt);
  }
  out.fitted = lx.size();
  if (lx.size() < 2) {
    out.degenerate = true;
    out.slope = 0.0;
    out.intercept = 0.0;
    return out;
  }
  const LineFit f = least_squares(lx, ly);
  out.slope = f.slope;
  out.intercept = f.intercept;
  return out;
}

double median(std::vector<double> values) {
  if (values.empty()) throw ArgumentError("median of an empty list");
  std::sort(values.begin(), values.end());
  const std::size_t h = values.size() / 2;
  return values.size() % 2 ? values[h] : 0.5 * (values[h - 1] + values[h]);
}

namespace {

std::vector<double> ranks(const std::vector<double>& v) {
  std::vector<std::size_t> order(v.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> r(v.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j + 1 < order.size() && v[order[j + 1]] == v[order[i]]) ++j;
    const double avg = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t t = i; t <= j; ++t) r[order[t]] = avg;
    i = j + 1;
  }
  return r;
}

}  // namespace

double spearman(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw ArgumentError("spearman needs >= 2 paired values");
  const auto rx = ranks(x);
  const auto ry = ranks(y);
  const double m = static_cast<double>(x.size());
  const double mx = std::accumulate(rx.begin(), rx.end(), 0.0) / m;
  const double my = std::accumulate(ry.begin(), ry.end(), 0.0) / m;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    sxy += (rx[i] - mx) * (ry[i] - my);
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - my) * (ry[i] - my);
  }
  if (!(sxx > 0.0 && syy > 0.0)) return 0.0;
  return sxy / std::sqrt(sxx * syy);
}

ConsistencySweep consistency_sweep(const DistributionInstance& dist,
                                   const std::vector<std::size_t>& n_grid, const KRule& rule,
                                   const ExcessConfig& cfg) {
  if (n_grid.empty()) throw ArgumentError("consistency sweep needs at least one sample size");
  ConsistencySweep out;
  std::vector<double> ns, medians;
  for (std::size_t n : n_grid) {
    ConsistencyPoint pt;
    pt.n = n;
    pt.k = rule.k_for(n);
    ExcessEstimate e = estimate_expected_excess(dist, n, pt.k, cfg);
    pt.mean_excess = e.mean;
    pt.median_excess = median(e.per_trial);
    pt.per_trial = std::move(e.per_trial);
    ns.push_back(static_cast<double>(n));
    medians.push_back(pt.median_excess);
    out.points.push_back(std::move(pt));
  }
  out.strictly_decreasing = true;
  for (std::size_t i = 1; i < medians.size(); ++i) {
    if (!(medians[i] < medians[i - 1])) out.strictly_decreasing = false;
  }
  out.spearman = medians.size() >= 2 ? spearman(ns, medians) : 0.0;
  return out;
}

}  // namespace nnrates
