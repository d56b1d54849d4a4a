#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "nnrates/classifier.hpp"
#include "nnrates/distributions.hpp"

namespace nnrates {

// How k is chosen for each n.
struct KRule {
  enum class Kind { Fixed, Power, Sqrt, Theorem4 };
  Kind kind = Kind::Fixed;
  std::size_t fixed = 1;          // Fixed
  double exponent = 0.5;          // Power: ⌈n^exponent⌉
  double k_o = 1.0;               // Theorem4: round(k_o n^{2α/(2α+1)} (ln 1/δ)^{1/(2α+1)})
  double alpha = 1.0;
  std::optional<double> delta;

  static KRule fixed_k(std::size_t k) {
    KRule r;
    r.fixed = k;
    return r;
  }
  static KRule power(double a) {
    KRule r;
    r.kind = Kind::Power;
    r.exponent = a;
    return r;
  }
  static KRule sqrt_n() {
    KRule r;
    r.kind = Kind::Sqrt;
    return r;
  }
  static KRule theorem4(double k_o, double alpha, std::optional<double> delta) {
    KRule r;
    r.kind = Kind::Theorem4;
    r.k_o = k_o;
    r.alpha = alpha;
    r.delta = delta;
    return r;
  }

  // Throws ArgumentError unless 1 ≤ k < n.
  std::size_t k_for(std::size_t n) const;
  std::string describe() const;
};

// How trials integrate over the query distribution μ.
enum class QueryMode {
  Auto,        // exact atom sums or the exact 1-D window sweep
  MonteCarlo,  // mc_points μ-draws per trial
};

// Seed of the training sample of trial `trial` at sample size n. Streams:
// 0 = training draws, 1 = Monte Carlo query points.
std::uint64_t trial_seed(std::uint64_t master_seed, std::size_t n, std::size_t trial,
                         std::uint64_t stream);

struct TrialRow {
  std::size_t trial = 0;
  std::size_t n = 0;
  std::size_t k = 0;
  double delta = 0.0;
  double mistake_prob = 0.0;
  double bound = 0.0;
  bool violated = false;
};

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

// Wilson score interval at 95%.
Interval wilson_interval(std::size_t successes, std::size_t trials);

struct TrialReport {
  std::vector<TrialRow> rows;
  std::size_t violations = 0;
  double frequency = 0.0;
  Interval wilson;
  double p = 0.0;      // ball mass parameter used by the bound
  double Delta = 0.0;  // margin parameter used by the bound
};

struct TrialConfig {
  std::size_t n = 0;
  std::size_t k = 1;
  double delta = 0.1;
  std::size_t trials = 400;
  std::size_t mc_points = 2000;
  std::uint64_t master_seed = 0;
  QueryMode query = QueryMode::Auto;
  std::size_t workers = 0;
};

// Pr_X(g_{n,k}(X) ≠ g(X)) of one training set drawn from `seed`.
MassQueryResult trial_mistake(const DistributionInstance& dist, std::size_t n, std::size_t k,
                              std::uint64_t seed, QueryMode query, std::size_t mc_points,
                              std::uint64_t query_seed);

// Violation frequency of δ + μ(∂_{p,Δ}) with the Theorem-1 parameters.
TrialReport run_upper_bound_trials(const DistributionInstance& dist, const TrialConfig& cfg);

// Violation frequency of δ + μ(∂_p), p from zero_bayes_params.
TrialReport run_zero_bayes_trials(const DistributionInstance& dist, const TrialConfig& cfg);

// C(n+m−1, m−1): the number of ways n draws can occupy m atoms.
double occupancy_state_count(std::size_t atoms, std::size_t n);

// E_n Pr_X(g_{n,k}(X) ≠ g(X)) on a finite atomic space by enumerating atom
// occupancy counts. Throws ResourceError when C(n+m−1, m−1) > max_states.
double exact_expected_mistake(const DistributionInstance& dist, std::size_t n, std::size_t k,
                              std::size_t max_states = 1000000);

struct LowerBoundBudget {
  std::size_t batch = 2000;
  std::size_t min_trials = 2000;
  std::size_t max_trials = 400000;
  std::size_t mc_points = 2000;
  QueryMode query = QueryMode::Auto;
  std::size_t workers = 0;
};

struct LowerBoundCheck {
  double lhs = 0.0;
  double lhs_stderr = 0.0;
  double rhs = 0.0;
  double c_o = 0.0;
  double high_error_mass = 0.0;
  std::size_t trials = 0;  // 0 when lhs came from the exact oracle
  bool exact = false;
  bool precision_met = false;  // stderr ≤ rhs/10 (or exact)
  bool pass = false;           // lhs ≥ rhs − 3 stderr
};

LowerBoundCheck run_lower_bound_check(const DistributionInstance& dist, std::size_t n,
                                      std::size_t k, const LowerBoundBudget& budget,
                                      std::uint64_t master_seed);

struct ExcessEstimate {
  double mean = 0.0;
  double stderr_ = 0.0;
  std::vector<double> per_trial;
};

struct ExcessConfig {
  std::size_t trials = 400;
  std::size_t mc_points = 2000;
  std::uint64_t master_seed = 0;
  QueryMode query = QueryMode::Auto;
  std::size_t workers = 0;
};

// Mean over trials of R_{n,k} − R*.
ExcessEstimate estimate_expected_excess(const DistributionInstance& dist, std::size_t n,
                                        std::size_t k, const ExcessConfig& cfg);

// Mean over trials of R_{n,k}(x) − R*(x) at a fixed query point.
ExcessEstimate estimate_pointwise_excess(const DistributionInstance& dist, const Point& x,
                                         std::size_t n, std::size_t k, const ExcessConfig& cfg);

struct RatePoint {
  std::size_t n = 0;
  std::size_t k = 0;
  double mean_excess = 0.0;
  double stderr_ = 0.0;
  bool excluded = false;  // mean ≤ 0, left out of the fit
};

struct RateSweep {
  std::vector<RatePoint> points;
  double slope = 0.0;
  double intercept = 0.0;
  std::size_t fitted = 0;
  bool degenerate = false;  // fewer than two points with positive mean
};

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
};

// Ordinary least squares y = intercept + slope·x.
LineFit least_squares(const std::vector<double>& x, const std::vector<double>& y);

RateSweep rate_sweep(const DistributionInstance& dist, const std::vector<std::size_t>& n_grid,
                     const KRule& rule, const ExcessConfig& cfg);

struct ConsistencyPoint {
  std::size_t n = 0;
  std::size_t k = 0;
  double median_excess = 0.0;
  double mean_excess = 0.0;
  std::vector<double> per_trial;
};

struct ConsistencySweep {
  std::vector<ConsistencyPoint> points;
  double spearman = 0.0;  // rank correlation of median excess with n
  bool strictly_decreasing = false;
};

ConsistencySweep consistency_sweep(const DistributionInstance& dist,
                                   const std::vector<std::size_t>& n_grid, const KRule& rule,
                                   const ExcessConfig& cfg);

double median(std::vector<double> values);
double spearman(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace nnrates
