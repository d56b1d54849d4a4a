#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "nnrates/distributions.hpp"
#include "nnrates/metric.hpp"

namespace nnrates {

// The fitted k-NN rule g_{n,k}: the augmented training sample and its metric.
class TrainedModel {
 public:
  TrainedModel(MetricSpace space, std::vector<AugmentedSample> samples);

  std::size_t size() const { return samples_.size(); }
  std::span<const AugmentedSample> samples() const { return samples_; }
  const MetricSpace& space() const { return space_; }

  // Sum of the labels of the first k points in the neighbor order of x.
  std::size_t label_sum(std::size_t k, const Point& x) const;
  // 1 iff label_sum(k, x) ≥ k/2.
  Label predict(std::size_t k, const Point& x) const;

 private:
  MetricSpace space_;
  std::vector<AugmentedSample> samples_;
};

TrainedModel fit(MetricSpace space, std::vector<AugmentedSample> samples);

inline Label majority_vote(std::size_t label_sum, std::size_t k) {
  return 2 * label_sum >= k ? 1 : 0;
}

// g(x) = 1(η(x) ≥ 1/2).
Label bayes_predict(const DistributionInstance& dist, const Point& x);

struct RiskReport {
  double conditional_risk = 0.0;  // R_{n,k}(x)
  double bayes_pointwise = 0.0;   // R*(x)
  double excess = 0.0;            // |1 − 2η(x)| · 1(g_{n,k}(x) ≠ g(x))
};

RiskReport conditional_risk(const DistributionInstance& dist, const TrainedModel& model,
                            std::size_t k, const Point& x);

// How Pr_X(·) integrals over μ are evaluated.
struct QueryMethod {
  enum class Kind {
    Exact,          // atom sums, FiniteAtomic only
    IntervalSweep,  // exact window sweep, 1-D families only
    MonteCarlo,     // mean over `points` μ-draws from `seed`
  };
  Kind kind = Kind::Exact;
  std::size_t points = 0;
  std::uint64_t seed = 0;
  std::size_t workers = 0;  // Monte Carlo threads; 0 = default_workers()

  static QueryMethod exact() { return {Kind::Exact, 0, 0, 0}; }
  static QueryMethod sweep() { return {Kind::IntervalSweep, 0, 0, 0}; }
  static QueryMethod monte_carlo(std::size_t points, std::uint64_t seed, std::size_t workers = 0) {
    return {Kind::MonteCarlo, points, seed, workers};
  }
  // Exact for FiniteAtomic, sweep for 1-D families.
  static QueryMethod best_exact(const DistributionInstance& dist) {
    return dist.is_interval() ? sweep() : exact();
  }
};

// Pr_X(g_{n,k}(X) ≠ g(X)). error_bound is the Monte Carlo standard error
// (0 for the exact methods).
MassQueryResult mistake_probability(const DistributionInstance& dist, const TrainedModel& model,
                                    std::size_t k, const QueryMethod& method);

// R_{n,k} − R* = E_X |1 − 2η(X)| 1(g_{n,k}(X) ≠ g(X)).
MassQueryResult excess_risk(const DistributionInstance& dist, const TrainedModel& model,
                            std::size_t k, const QueryMethod& method);

struct RiskIntegrals {
  MassQueryResult mistake;
  MassQueryResult excess;
};

// Both integrals from one pass.
RiskIntegrals risk_integrals(const DistributionInstance& dist, const TrainedModel& model,
                             std::size_t k, const QueryMethod& method);

struct SweepResult {
  double mistake = 0.0;
  double excess = 0.0;
};

// Exact mistake probability and excess risk of the k-NN rule on a 1-D family.
// In one dimension the k nearest neighbors of x form a contiguous window of the
// sorted sample; window i is the neighbor set between the midpoints
// (x_{i-1} + x_{i+k-1})/2 and (x_i + x_{i+k})/2, and its vote is constant there.
// `location` must be sorted by (location, z, index) with `label` permuted alike.
SweepResult sweep_interval(const IntervalModel& model, std::span<const double> location,
                           std::span<const std::uint8_t> label, std::size_t k);

// Sorts draws into neighbor-order tie-breaking order (location, z, index).
void sort_draws(IntervalDraws& draws);

}  // namespace nnrates
