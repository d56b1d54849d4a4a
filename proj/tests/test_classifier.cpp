#include <cmath>

#include "doctest.h"
#include "fixtures.hpp"
#include "nnrates/classifier.hpp"
#include "nnrates/presets.hpp"

using namespace nnrates;
using fixtures::sample;

TEST_CASE("fit and predict") {
  const MetricSpace line = MetricSpace::interval(0.0, 1.0);
  const TrainedModel m = fit(line, {sample(0.1, 0.5, 0, 0), sample(0.2, 0.5, 1, 1), sample(0.3, 0.5, 2, 1)});
  CHECK(m.size() == 3);
  CHECK(m.predict(1, 0.0) == 0);
  CHECK(m.predict(3, 0.0) == 1);  // labels (0,1,1)
  CHECK(m.predict(2, 0.0) == 1);  // sum 1 ≥ 2/2
  CHECK(m.label_sum(2, 0.35) == 2);

  // duplicate locations rank by z
  const TrainedModel dup = fit(line, {sample(0.5, 0.9, 0, 0), sample(0.5, 0.1, 1, 1)});
  CHECK(dup.predict(1, 0.5) == 1);
  CHECK(dup.predict(1, 0.0) == 1);
}

TEST_CASE("Bayes prediction convention") {
  const auto pm = DistributionInstance::power_margin(1.0);
  CHECK(bayes_predict(pm, 0.7) == 1);
  CHECK(bayes_predict(pm, 0.5) == 1);
  CHECK(bayes_predict(pm, 0.3) == 0);
}

TEST_CASE("conditional risk") {
  const MetricSpace line = MetricSpace::interval(0.0, 1.0);
  const auto pm = DistributionInstance::power_margin(1.0);
  const TrainedModel ones = fit(line, {sample(0.3, 0.5, 0, 1)});
  const RiskReport r = conditional_risk(pm, ones, 1, 0.3);
  CHECK(r.conditional_risk == doctest::Approx(0.7));
  CHECK(r.bayes_pointwise == doctest::Approx(0.3));
  CHECK(r.excess == doctest::Approx(0.4));
  const TrainedModel zeros = fit(line, {sample(0.3, 0.5, 0, 0)});
  CHECK(conditional_risk(pm, zeros, 1, 0.3).excess == 0.0);
  CHECK(conditional_risk(pm, ones, 1, 0.5).excess == 0.0);
  CHECK(conditional_risk(pm, zeros, 1, 0.5).excess == 0.0);
}

TEST_CASE("excess identity, global majority and scaling") {
  const auto pm = DistributionInstance::power_margin(1.0);
  const auto draws = pm.sample_labeled(11, 25);
  const TrainedModel m = fit(pm.space(), draws);
  const TrainedModel scaled = fit(pm.space().scaled(5.0), draws);
  std::size_t ones = 0;
  for (const auto& s : draws) ones += s.label;
  for (int i = 0; i <= 40; ++i) {
    const double x = i / 40.0;
    for (std::size_t k : {1, 2, 5, 25}) {
      const RiskReport r = conditional_risk(pm, m, k, x);
      const double eta = pm.eta_point(x);
      const double want = std::abs(1 - 2 * eta) * (m.predict(k, x) != bayes_predict(pm, x));
      CHECK(r.conditional_risk - r.bayes_pointwise == doctest::Approx(want).epsilon(1e-12));
      CHECK(scaled.predict(k, x) == m.predict(k, x));
    }
    CHECK(m.predict(25, x) == majority_vote(ones, 25));
  }
}

TEST_CASE("mistake probability on small cases") {
  const auto two = fixtures::two_atoms(0.3, 0.7, 0.2, 0.8);
  // one sample at b labeled 1: predicts 1 everywhere, Bayes says 0 at a
  const TrainedModel m = fit(two.space(), {sample(AtomId{1}, 0.5, 0, 1)});
  CHECK(mistake_probability(two, m, 1, QueryMethod::exact()).value == doctest::Approx(0.3));
  const TrainedModel agree = fit(two.space(), {sample(AtomId{0}, 0.5, 0, 0), sample(AtomId{1}, 0.5, 1, 1)});
  CHECK(mistake_probability(two, agree, 1, QueryMethod::exact()).value == 0.0);

  const auto pm = DistributionInstance::power_margin(1.0);
  const TrainedModel pmm = fit(pm.space(), pm.sample_labeled(5, 200));
  const auto a = mistake_probability(pm, pmm, 9, QueryMethod::monte_carlo(5000, 17, 1));
  const auto b = mistake_probability(pm, pmm, 9, QueryMethod::monte_carlo(5000, 17, 4));
  CHECK(a.value == b.value);
  CHECK(a.error_bound == b.error_bound);
}

TEST_CASE("window sweep agrees with pointwise prediction") {
  for (const auto& dist : {DistributionInstance::power_margin(1.0), DistributionInstance::power_margin(0.5),
                           presets::gapped_two_level(), presets::disjoint_support()}) {
    for (std::size_t n : {1, 2, 7, 60}) {
      IntervalDraws d = dist.sample_interval(100 + n, n);
      std::vector<AugmentedSample> samples;
      for (std::size_t i = 0; i < n; ++i) samples.push_back(sample(d.location[i], d.z[i], i, d.label[i]));
      const TrainedModel model = fit(dist.space(), samples);
      sort_draws(d);
      for (std::size_t k = 1; k <= n; k += 2) {
        const SweepResult s = sweep_interval(dist.interval(), d.location, d.label, k);
        // fine Riemann sum of the disagreement indicator against μ
        const int grid = 20000;
        double mistake = 0, excess = 0;
        for (int g = 0; g < grid; ++g) {
          const double lo = static_cast<double>(g) / grid, hi = static_cast<double>(g + 1) / grid;
          const double x = 0.5 * (lo + hi);
          const double w = dist.interval().mass(lo, hi);
          if (model.predict(k, x) != bayes_predict(dist, x)) {
            mistake += w;
            excess += w * std::abs(1 - 2 * dist.eta_point(x));
          }
        }
        // each decision switch costs at most one grid cell
        const double tol = 2.0 * (n + 2) * dist.interval().max_density() / grid;
        CHECK(std::abs(s.mistake - mistake) <= tol);
        CHECK(std::abs(s.excess - excess) <= tol);
        const auto exact = risk_integrals(dist, model, k, QueryMethod::sweep());
        CHECK(exact.mistake.value == doctest::Approx(s.mistake).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("Monte Carlo query agrees with the sweep") {
  const auto pm = DistributionInstance::power_margin(1.0);
  const TrainedModel m = fit(pm.space(), pm.sample_labeled(21, 300));
  const auto exact = risk_integrals(pm, m, 15, QueryMethod::sweep());
  const auto mc = risk_integrals(pm, m, 15, QueryMethod::monte_carlo(200000, 3));
  CHECK(std::abs(mc.mistake.value - exact.mistake.value) <= 4 * mc.mistake.error_bound + 1e-12);
  CHECK(std::abs(mc.excess.value - exact.excess.value) <= 4 * mc.excess.error_bound + 1e-12);
}
