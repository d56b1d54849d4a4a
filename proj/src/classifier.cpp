#include "nnrates/classifier.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "nnrates/parallel.hpp"
#include "nnrates/rng.hpp"

namespace nnrates {

TrainedModel::TrainedModel(MetricSpace space, std::vector<AugmentedSample> samples)
    : space_(std::move(space)), samples_(std::move(samples)) {
  if (samples_.empty()) throw ArgumentError("cannot fit on an empty sample");
  for (const auto& s : samples_) {
    if (!(s.point.z >= 0.0 && s.point.z < 1.0)) throw ArgumentError("tie-break z must lie in [0,1)");
    if (s.label != 0 && s.label != 1) throw ArgumentError("labels must be 0 or 1");
    if (!space_.contains(s.point.location)) throw DomainError("training point outside the space");
  }
}

std::size_t TrainedModel::label_sum(std::size_t k, const Point& x) const {
  if (k == 0 || k > samples_.size()) {
    throw ArgumentError("k must satisfy 1 <= k <= n (k=" + std::to_string(k) +
                        ", n=" + std::to_string(samples_.size()) + ")");
  }
  const auto nearest = nearest_positions(
      space_, x, std::span<const AugmentedSample>(samples_), k,
      [](const AugmentedSample& s) -> const AugmentedPoint& { return s.point; });
  std::size_t sum = 0;
  for (std::size_t pos : nearest) sum += static_cast<std::size_t>(samples_[pos].label);
  return sum;
}

Label TrainedModel::predict(std::size_t k, const Point& x) const {
  return majority_vote(label_sum(k, x), k);
}

TrainedModel fit(MetricSpace space, std::vector<AugmentedSample> samples) {
  return TrainedModel(std::move(space), std::move(samples));
}

Label bayes_predict(const DistributionInstance& dist, const Point& x) {
  return dist.eta_point(x) >= 0.5 ? 1 : 0;
}

RiskReport conditional_risk(const DistributionInstance& dist, const TrainedModel& model,
                            std::size_t k, const Point& x) {
  const double eta = dist.eta_point(x);
  const Label pred = model.predict(k, x);
  RiskReport r;
  r.conditional_risk = pred == 0 ? eta : 1.0 - eta;
  r.bayes_pointwise = std::min(eta, 1.0 - eta);
  r.excess = pred != bayes_predict(dist, x) ? std::abs(1.0 - 2.0 * eta) : 0.0;
  return r;
}

namespace {

RiskIntegrals exact_atomic(const DistributionInstance& dist, const TrainedModel& model, std::size_t k) {
  const auto& a = dist.atomic();
  RiskIntegrals out;
  for (std::size_t j = 0; j < a.mass.size(); ++j) {
    if (a.mass[j] <= 0.0) continue;
    const Point x = AtomId{j};
    if (model.predict(k, x) != bayes_predict(dist, x)) {
      out.mistake.value += a.mass[j];
      out.excess.value += a.mass[j] * std::abs(1.0 - 2.0 * a.eta[j]);
    }
  }
  return out;
}

RiskIntegrals sweep_model(const DistributionInstance& dist, const TrainedModel& model, std::size_t k) {
  const IntervalModel& m = dist.interval();
  if (k == 0 || k > model.size()) throw ArgumentError("k must satisfy 1 <= k <= n");
  IntervalDraws d;
  for (const auto& s : model.samples()) {
    d.location.push_back(std::get<double>(s.point.location));
    d.z.push_back(s.point.z);
    d.label.push_back(static_cast<std::uint8_t>(s.label));
  }
  sort_draws(d);
  const SweepResult r = sweep_interval(m, d.location, d.label, k);
  return {{r.mistake, 0.0}, {r.excess, 0.0}};
}

RiskIntegrals monte_carlo(const DistributionInstance& dist, const TrainedModel& model, std::size_t k,
                      std::size_t points, std::uint64_t seed, std::size_t workers) {
  if (points == 0) throw ArgumentError("Monte Carlo needs at least one query point");
  struct PointResult {
    double mistake = 0.0;
    double excess = 0.0;
  };
  const auto per_point = parallel_map<PointResult>(points, [&](std::size_t i) {
    Rng rng(derive_seed(seed, i));
    const Point x = dist.sample_point(rng);
    const double eta = dist.eta_point(x);
    PointResult out;
    if (model.predict(k, x) != (eta >= 0.5 ? 1 : 0)) {
      out.mistake = 1.0;
      out.excess = std::abs(1.0 - 2.0 * eta);
    }
    return out;
  }, workers);
  double sm = 0.0, sm2 = 0.0, se = 0.0, se2 = 0.0;
  for (const auto& p : per_point) {
    sm += p.mistake;
    sm2 += p.mistake * p.mistake;
    se += p.excess;
    se2 += p.excess * p.excess;
  }
  const double m = static_cast<double>(points);
  auto stderr_of = [m](double s, double s2) {
    if (m < 2) return 0.0;
    const double mean = s / m;
    const double var = std::max(0.0, (s2 - m * mean * mean) / (m - 1));
    return std::sqrt(var / m);
  };
  return {{sm / m, stderr_of(sm, sm2)}, {se / m, stderr_of(se, se2)}};
}

RiskIntegrals integrate(const DistributionInstance& dist, const TrainedModel& model, std::size_t k,
                    const QueryMethod& method) {
  switch (method.kind) {
    case QueryMethod::Kind::Exact:
      if (dist.family() != Family::FiniteAtomic) {
        throw UnsupportedError("exact evaluation requires a finite_atomic distribution");
      }
      return exact_atomic(dist, model, k);
    case QueryMethod::Kind::IntervalSweep:
      return sweep_model(dist, model, k);
    case QueryMethod::Kind::MonteCarlo:
      return monte_carlo(dist, model, k, method.points, method.seed, method.workers);
  }
  return {};
}

}  // namespace

RiskIntegrals risk_integrals(const DistributionInstance& dist, const TrainedModel& model,
                             std::size_t k, const QueryMethod& method) {
  return integrate(dist, model, k, method);
}

MassQueryResult mistake_probability(const DistributionInstance& dist, const TrainedModel& model,
                                    std::size_t k, const QueryMethod& method) {
  return integrate(dist, model, k, method).mistake;
}

MassQueryResult excess_risk(const DistributionInstance& dist, const TrainedModel& model,
                            std::size_t k, const QueryMethod& method) {
  return integrate(dist, model, k, method).excess;
}

SweepResult sweep_interval(const IntervalModel& model, std::span<const double> location,
                           std::span<const std::uint8_t> label, std::size_t k) {
  const std::size_t n = location.size();
  if (k == 0 || k > n) throw ArgumentError("k must satisfy 1 <= k <= n");
  std::vector<std::size_t> prefix(n + 1, 0);
  for (std::size_t i = 0; i < n; ++i) prefix[i + 1] = prefix[i] + label[i];
  constexpr double inf = std::numeric_limits<double>::infinity();
  SweepResult out;
  for (std::size_t i = 0; i + k <= n; ++i) {
    const double a = i == 0 ? -inf : 0.5 * (location[i - 1] + location[i + k - 1]);
    const double b = i + k == n ? inf : 0.5 * (location[i] + location[i + k]);
    if (!(a < b)) continue;
    const Label vote = majority_vote(prefix[i + k] - prefix[i], k);
    out.mistake += model.mass_where_bayes(a, b, 1 - vote);
    out.excess += model.abs_margin_where_bayes(a, b, 1 - vote);
  }
  return out;
}

void sort_draws(IntervalDraws& d) {
  struct Draw {
    double location;
    double z;
    std::uint32_t index;
    std::uint8_t label;
  };
  const std::size_t n = d.location.size();
  std::vector<Draw> draws(n);
  for (std::size_t i = 0; i < n; ++i) {
    draws[i] = {d.location[i], d.z[i], static_cast<std::uint32_t>(i), d.label[i]};
  }
  auto before = [](const Draw& a, const Draw& b) {
    if (a.location != b.location) return a.location < b.location;
    if (a.z != b.z) return a.z < b.z;
    return a.index < b.index;
  };
  // Locations lie in [0,1]: bucket by floor(n·x), then insertion-sort each
  // bucket. Buckets hold O(1) draws on average for bounded densities.
  auto bucket = [n](double x) {
    return std::min(n - 1, static_cast<std::size_t>(std::max(0.0, x) * static_cast<double>(n)));
  };
  std::vector<std::uint32_t> start(n + 1, 0);
  for (const Draw& w : draws) ++start[bucket(w.location) + 1];
  for (std::size_t b = 0; b < n; ++b) start[b + 1] += start[b];
  std::vector<Draw> sorted(n);
  std::vector<std::uint32_t> fill(start.begin(), start.end() - 1);
  for (const Draw& w : draws) sorted[fill[bucket(w.location)]++] = w;
  for (std::size_t b = 0; b < n; ++b) {
    for (std::size_t i = start[b] + 1; i < start[b + 1]; ++i) {
      const Draw w = sorted[i];
      std::size_t j = i;
      for (; j > start[b] && before(w, sorted[j - 1]); --j) sorted[j] = sorted[j - 1];
      sorted[j] = w;
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    d.location[i] = sorted[i].location;
    d.z[i] = sorted[i].z;
    d.label[i] = sorted[i].label;
  }
}

}  // namespace nnrates
