#include <cmath>

#include "doctest.h"
#include "fixtures.hpp"
#include "nnrates/boundary.hpp"
#include "nnrates/bounds.hpp"
#include "nnrates/errors.hpp"
#include "nnrates/presets.hpp"

using namespace nnrates;

TEST_CASE("region verdicts on the disjoint-support family") {
  const auto d = presets::disjoint_support();
  CHECK(region_classify(d, 0.7, 0.1, 0.25).verdict == Region::InteriorPlus);
  CHECK(region_classify(d, 0.3, 0.1, 0.25).verdict == Region::InteriorMinus);
  const RegionVerdict b = region_classify(d, 0.51, 0.1, 0.25);
  CHECK(b.verdict == Region::Boundary);
  REQUIRE(b.binding_radius);
  CHECK(*b.binding_radius <= d.prob_radius(0.51, 0.1) + 1e-12);
  // closed form: X+ = [0.5 + Δp, 1]
  CHECK(region_classify(d, 0.5 + 0.025 + 1e-6, 0.1, 0.25).verdict == Region::InteriorPlus);
  CHECK(region_classify(d, 0.5 + 0.025 - 1e-6, 0.1, 0.25).verdict == Region::Boundary);
  // Δ = 1/2 gives the zero-Bayes interior
  CHECK(region_classify(d, 0.6 + 1e-9, 0.1, 0.5).verdict == Region::InteriorPlus);
}

TEST_CASE("region verdict edge cases") {
  const auto c = presets::constant_eta(0.8);
  CHECK(region_classify(c, 0.4, 0.2, 0.0).verdict == Region::InteriorPlus);
  const auto pm = DistributionInstance::power_margin(1.0);
  CHECK(region_classify(pm, 0.5, 0.01, 0.0).verdict == Region::Boundary);
  const auto gap = presets::gapped_two_level();
  CHECK(region_classify(gap, 0.5, 0.1, 0.1).verdict == Region::NotInSupport);
  CHECK_THROWS_AS(region_classify(pm, 0.5, 0.0, 0.1), ArgumentError);
  CHECK_THROWS_AS(region_classify(pm, 0.5, 0.1, 0.6), ArgumentError);
}

TEST_CASE("boundary measure closed forms") {
  const auto d = presets::disjoint_support();
  const auto m = boundary_measure(d, 0.1, 0.25);
  CHECK(std::abs(m.value - 0.05) <= m.error_bound + 1e-12);
  CHECK(m.error_bound < 1e-9);
  CHECK(boundary_measure(d, 0.1, 0.5).value == doctest::Approx(0.1).epsilon(1e-9));
  const auto atoms = fixtures::two_atoms(0.5, 0.5, 1.0, 0.0);
  for (double delta : {0.0, 0.2, 0.5}) CHECK(boundary_measure(atoms, 0.4, delta).value == 0.0);
}

TEST_CASE("boundary measure agrees with sampled verdicts") {
  const auto pm = DistributionInstance::power_margin(1.0);
  const double p = 0.05, delta = 0.1;
  const auto m = boundary_measure(pm, p, delta);
  Rng rng(8);
  const int n = 100000;
  int hits = 0;
  for (int i = 0; i < n; ++i) hits += region_classify(pm, pm.sample_point(rng), p, delta).verdict == Region::Boundary;
  const double freq = static_cast<double>(hits) / n;
  CHECK(std::abs(freq - m.value) <= 3 * std::sqrt(m.value * (1 - m.value) / n));
}

TEST_CASE("nesting of effective boundaries") {
  const auto pm = DistributionInstance::power_margin(1.0);
  const double ps[] = {0.02, 0.05, 0.1, 0.2};
  const double ds[] = {0.0, 0.05, 0.15, 0.3};
  for (int i = 0; i <= 200; ++i) {
    const double x = i / 200.0;
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 4; ++b) {
        if (region_classify(pm, x, ps[a], ds[b]).verdict != Region::Boundary) continue;
        for (int a2 = a; a2 < 4; ++a2)
          for (int b2 = b; b2 < 4; ++b2) CHECK(region_classify(pm, x, ps[a2], ds[b2]).verdict == Region::Boundary);
      }
  }
}

TEST_CASE("high-error set") {
  const auto d = presets::disjoint_support();
  const HighErrorVerdict v = high_error_classify(d, 0.5005, 10000, 100);
  CHECK(v.verdict);
  CHECK(v.side == Side::Plus);
  CHECK_FALSE(high_error_classify(d, 0.502, 10000, 100).verdict);
  CHECK(high_error_classify(d, 0.4995, 10000, 100).side == Side::Minus);
  const auto pm = DistributionInstance::power_margin(1.0);
  CHECK_FALSE(high_error_classify(pm, 0.5, 1000, 10).verdict);

  const auto m = high_error_measure(d, 10000, 100);
  CHECK(std::abs(m.value - 0.002) <= m.error_bound + 1e-12);
  CHECK(high_error_measure(presets::constant_eta(0.9), 1000, 100).value == 0.0);
  // with k = 1 the band 1/2 ± 1 is the whole unit interval, so E covers the support
  CHECK(high_error_measure(fixtures::two_atoms(0.5, 0.5, 1.0, 0.0), 10, 1).value == 1.0);
  CHECK(high_error_measure(fixtures::two_atoms(0.5, 0.5, 1.0, 0.0), 10, 5).value == 0.0);
  CHECK_THROWS_AS(high_error_measure(d, 10, 10), ArgumentError);
}

TEST_CASE("margin mass") {
  const auto pm = DistributionInstance::power_margin(1.0);
  CHECK(margin_mass(pm, 0.2) == doctest::Approx(0.4).epsilon(1e-12));
  CHECK(margin_mass(presets::disjoint_support(), 0.49) == 0.0);
  CHECK(margin_mass(presets::gapped_two_level(), 0.5) == doctest::Approx(1.0));
  for (double gamma : {0.5, 1.0, 2.0}) {
    const auto g = DistributionInstance::power_margin(gamma);
    double prev = 0.0;
    for (int i = 0; i <= 50; ++i) {
      const double t = i / 100.0;
      const double v = margin_mass(g, t);
      CHECK(v >= prev);
      CHECK(std::abs(v - std::pow(2 * t, 1 / gamma)) < 1e-12);
      prev = v;
    }
  }
}

TEST_CASE("smoothness audit") {
  const auto d = presets::disjoint_support();
  const auto v = smoothness_audit(d, 1.0, 1.0, {{0.501, 0.002}});
  REQUIRE(v);
  CHECK(v->amount == doctest::Approx(0.25 - 0.004).epsilon(1e-9));
  CHECK_FALSE(smoothness_audit(presets::constant_eta(0.3), 2.0, 0.01, {{0.2, 0.1}, {0.9, 0.5}}));

  std::vector<SmoothnessProbe> probes;
  for (int i = 0; i <= 100; ++i)
    for (int j = 1; j <= 50; ++j) probes.push_back({i / 100.0, j / 50.0});
  CHECK(smoothness_constant(presets::gapped_two_level(), 1.0, probes) <= 0.5);
  CHECK(smoothness_constant(DistributionInstance::power_margin(1.0), 1.0, probes) <= 0.5 + 1e-12);
  CHECK_FALSE(smoothness_audit(DistributionInstance::power_margin(1.0), 1.0, 0.5, probes));
}

TEST_CASE("smooth containments") {
  const auto pm = DistributionInstance::power_margin(1.0);
  const SmoothnessSpec s{1.0, 0.5};
  const std::size_t n = 100000, k = 100;
  const double p = 0.04, delta = 0.1;
  const Thresholds t = smooth_thresholds(s, p, delta, n, k);
  for (int i = 0; i <= 400; ++i) {
    const double x = i / 400.0;
    const double gap = std::abs(pm.eta_point(x) - 0.5);
    if (region_classify(pm, x, p, delta).verdict == Region::Boundary) CHECK(gap <= t.upper_band + 1e-9);
    if (gap > 0 && gap <= t.lower_band) CHECK(high_error_classify(pm, x, n, k).verdict);
  }
}
