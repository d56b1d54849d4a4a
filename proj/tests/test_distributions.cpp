#include <cmath>

#include "doctest.h"
#include "fixtures.hpp"
#include "nnrates/distributions.hpp"
#include "nnrates/errors.hpp"
#include "nnrates/presets.hpp"

using namespace nnrates;

namespace {

DistributionInstance gap_family() {
  // density 0 on (0.4, 0.6)
  return DistributionInstance::piecewise_uniform({{0.0, 0.4, 0.6, 1.0}, {1.25, 0.0, 1.25}},
                                                 {{0.0, 0.4, 0.6, 1.0}, {1.25, 0.0, 1.25}}, 0.5);
}

std::vector<DistributionInstance> families() {
  return {presets::disjoint_support(), DistributionInstance::power_margin(1.0),
          DistributionInstance::power_margin(2.5), presets::gapped_two_level(),
          fixtures::two_atoms(0.3, 0.7, 0.2, 0.9)};
}

}  // namespace

TEST_CASE("sampling") {
  const auto single = DistributionInstance::finite_atomic(
      MetricSpace::finite(DistanceMatrix(1, {0.0})), {1.0}, {1.0});
  const auto s = single.sample_labeled(5, 3);
  REQUIRE(s.size() == 3);
  for (const auto& a : s) {
    CHECK(std::get<AtomId>(a.point.location).index == 0);
    CHECK(a.label == 1);
  }

  const auto two = fixtures::two_atoms(0.5, 0.5, 0.5, 0.5);
  const auto a = two.sample_labeled(42, 100000);
  const auto b = two.sample_labeled(42, 100000);
  std::size_t on_a = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].point.location == b[i].point.location);
    CHECK(a[i].point.z == b[i].point.z);
    on_a += std::get<AtomId>(a[i].point.location).index == 0;
  }
  CHECK(std::abs(on_a / 1e5 - 0.5) < 0.01);
}

TEST_CASE("interval draws match the labeled stream") {
  const auto d = DistributionInstance::power_margin(1.0);
  const auto labeled = d.sample_labeled(9, 200);
  const auto soa = d.sample_interval(9, 200);
  for (std::size_t i = 0; i < 200; ++i) {
    CHECK(std::get<double>(labeled[i].point.location) == soa.location[i]);
    CHECK(labeled[i].point.z == soa.z[i]);
    CHECK(labeled[i].label == soa.label[i]);
  }
}

TEST_CASE("label frequency at an atom tracks eta") {
  const auto d = fixtures::two_atoms(0.5, 0.5, 0.3, 0.8);
  const auto s = d.sample_labeled(77, 100000);
  double n0 = 0, y0 = 0;
  for (const auto& a : s) {
    if (std::get<AtomId>(a.point.location).index == 0) {
      ++n0;
      y0 += a.label;
    }
  }
  const double sd = std::sqrt(0.3 * 0.7 / n0);
  CHECK(std::abs(y0 / n0 - 0.3) < 3 * sd);
}

TEST_CASE("ball mass") {
  const auto pm = DistributionInstance::power_margin(1.0);
  CHECK(pm.ball_mass(0.5, 0.2, BallKind::Closed).value == doctest::Approx(0.4));
  const auto two = fixtures::two_atoms(0.3, 0.7, 0.5, 0.5);
  CHECK(two.ball_mass(AtomId{0}, 1.0, BallKind::Closed).value == doctest::Approx(1.0));
  CHECK(two.ball_mass(AtomId{0}, 1.0, BallKind::Open).value == doctest::Approx(0.3));
  const auto uni = presets::constant_eta(0.5);
  CHECK(uni.ball_mass(0.0, 0.2, BallKind::Closed).value == doctest::Approx(0.2));
}

TEST_CASE("probability radius") {
  const auto two = fixtures::two_atoms(0.3, 0.7, 0.5, 0.5);
  CHECK(two.prob_radius(AtomId{0}, 0.3) == 0.0);
  CHECK(two.prob_radius(AtomId{0}, 0.5) == 1.0);
  const auto pm = DistributionInstance::power_margin(1.0);
  CHECK(pm.prob_radius(0.5, 0.1) == doctest::Approx(0.05).epsilon(1e-12));
  CHECK(pm.prob_radius(0.0, 0.1) == doctest::Approx(0.1).epsilon(1e-12));
  // from the gap's edge the ball gains mass on one side only until it reaches 0.6
  const auto gap = gap_family();
  CHECK(gap.prob_radius(0.4, 0.25) == doctest::Approx(0.2).epsilon(1e-12));
  CHECK(gap.prob_radius(0.4, 0.5) == doctest::Approx(0.3).epsilon(1e-12));
}

TEST_CASE("probability radius is monotone and attains p") {
  for (const auto& d : families()) {
    Rng rng(3);
    for (int i = 0; i < 30; ++i) {
      const Point x = d.sample_point(rng);
      double prev = 0.0;
      for (int j = 1; j <= 99; ++j) {
        const double p = j / 100.0;
        const double r = d.prob_radius(x, p);
        CHECK(r >= prev);
        CHECK(d.ball_mass(x, r, BallKind::Closed).value >= p - 1e-9);
        prev = r;
      }
    }
  }
}

TEST_CASE("eta point and ball averages") {
  const auto pm = DistributionInstance::power_margin(1.0);
  CHECK(pm.eta_point(0.75) == doctest::Approx(0.75));
  CHECK(DistributionInstance::power_margin(3.0).eta_point(0.5) == 0.5);
  CHECK(fixtures::two_atoms(0.5, 0.5, 0.3, 0.6).eta_point(AtomId{0}) == 0.3);
  CHECK(pm.eta_ball(0.5, 0.2, BallKind::Closed).value == doctest::Approx(0.5));
  CHECK(pm.eta_ball(0.0, 0.2, BallKind::Closed).value == doctest::Approx(0.1));

  const auto two = fixtures::two_atoms(0.5, 0.5, 1.0, 0.0);
  const double aug = two.eta_ball(AtomId{0}, 1.0, BallKind::Augmented, 0.5).value;
  CHECK(aug == doctest::Approx(2.0 / 3.0).epsilon(1e-14));
  const double open = two.eta_ball(AtomId{0}, 1.0, BallKind::Open).value;
  const double closed = two.eta_ball(AtomId{0}, 1.0, BallKind::Closed).value;
  CHECK(aug <= open);
  CHECK(aug >= closed);
}

TEST_CASE("open ball average follows closed balls") {
  // q = the smallest closed-ball average on a grid of r < r_o that runs up to
  // r_o; the open ball at r_o keeps it
  for (const auto& d : {DistributionInstance::power_margin(1.0), DistributionInstance::power_margin(2.0),
                        presets::gapped_two_level()}) {
    for (double x : {0.02, 0.3, 0.45, 0.7, 0.97}) {
      if (!d.in_support(x)) continue;
      for (double r_o : {0.01, 0.1, 0.25, 0.6}) {
        double q = 1.0;
        for (int i = 1; i < 400; ++i) q = std::min(q, d.eta_ball(x, r_o * i / 400.0, BallKind::Closed).value);
        q = std::min(q, d.eta_ball(x, r_o * (1 - 1e-12), BallKind::Closed).value);
        CHECK(d.eta_ball(x, r_o, BallKind::Open).value >= q - 1e-9);
      }
    }
  }
  // on atoms the open ball drops the sphere
  const auto two = fixtures::two_atoms(0.5, 0.5, 1.0, 0.0);
  CHECK(two.eta_ball(AtomId{0}, 0.999, BallKind::Closed).value == 1.0);
  CHECK(two.eta_ball(AtomId{0}, 1.0, BallKind::Open).value >= 1.0 - 1e-9);
}

TEST_CASE("support") {
  CHECK(fixtures::two_atoms(0.3, 0.7, 0.5, 0.5).in_support(AtomId{0}));
  const auto gap = gap_family();
  CHECK_FALSE(gap.in_support(0.5));
  CHECK(gap.in_support(0.4));
  CHECK(gap.in_support(0.6));
}

TEST_CASE("Bayes risk") {
  CHECK(presets::disjoint_support().bayes_risk() == 0.0);
  const auto single = DistributionInstance::finite_atomic(
      MetricSpace::finite(DistanceMatrix(1, {0.0})), {1.0}, {0.3});
  CHECK(single.bayes_risk() == doctest::Approx(0.3));
  CHECK(DistributionInstance::power_margin(1.0).bayes_risk() == doctest::Approx(0.25).epsilon(1e-14));
  CHECK(presets::gapped_two_level().bayes_risk() == doctest::Approx(0.1).epsilon(1e-14));
}

TEST_CASE("invalid parameters") {
  CHECK_THROWS(fixtures::two_atoms(0.5, 0.6, 0.5, 0.5));
  CHECK_THROWS(fixtures::two_atoms(0.5, 0.5, 1.5, 0.5));
  CHECK_THROWS(DistributionInstance::power_margin(0.0));
  CHECK_THROWS(DistributionInstance::piecewise_uniform({{0.0, 1.0}, {1.0}}, {{0.0, 1.0}, {1.0}}, 1.5));
}
