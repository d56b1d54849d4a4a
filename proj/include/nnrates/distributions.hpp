#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "nnrates/metric.hpp"
#include "nnrates/rng.hpp"

namespace nnrates {

using Label = int;

// Training point (x, z, y) with its position in the draw sequence.
struct AugmentedSample {
  AugmentedPoint point;
  Label label = 0;
};

struct MassQueryResult {
  double value = 0.0;
  double error_bound = 0.0;
};

enum class BallKind { Open, Closed, Augmented };

enum class Family { FiniteAtomic, PiecewiseUniform1D, PowerMargin1D };

std::string to_string(Family family);

// Atom masses and per-atom η over a finite metric space.
struct AtomicModel {
  std::vector<double> mass;
  std::vector<double> eta;
};

// How η behaves on one segment of a 1-D family.
enum class EtaShape {
  Constant,    // η = value
  PowerBelow,  // η(x) = 1/2 − (1/2)(1 − 2x)^γ, used on [0, 1/2)
  PowerAbove,  // η(x) = 1/2 + (1/2)(2x − 1)^γ, used on [1/2, 1]
};

struct Segment {
  double lo = 0.0;
  double hi = 0.0;
  double density = 0.0;
  EtaShape shape = EtaShape::Constant;
  double value = 0.5;
  double gamma = 1.0;
};

// A measure on [0,1] with piecewise-constant density and η given per segment.
// Segments are half-open [lo, hi) except the last, which contains 1. All
// integrals are closed-form per segment.
class IntervalModel {
 public:
  explicit IntervalModel(std::vector<Segment> segments);

  std::span<const Segment> segments() const { return segments_; }
  std::size_t segment_index(double x) const;
  // Segment whose closure contains x from the left (x > lo).
  std::size_t segment_index_left(double x) const;

  // η of segment j evaluated at x (continuous extension to its closure).
  double eta_on(std::size_t j, double x) const;
  double eta(double x) const { return eta_on(segment_index(x), x); }
  Label bayes_label(std::size_t j) const;

  // Integrals over [a, b] ∩ [0, 1] with respect to μ.
  double mass(double a, double b) const;
  double eta_integral(double a, double b) const;
  double abs_margin_integral(double a, double b) const;  // ∫ |1 − 2η| dμ
  double mass_where_bayes(double a, double b, Label label) const;
  double abs_margin_where_bayes(double a, double b, Label label) const;

  double quantile(double u) const;
  double max_density() const;
  // Segment endpoints, sorted, including 0 and 1.
  std::vector<double> breakpoints() const;

 private:
  std::vector<Segment> segments_;
  std::vector<double> cumulative_;  // μ([0, segments_[j].hi])
};

// Class-conditional piecewise-constant density on [0,1]:
// heights[i] on [breaks[i], breaks[i+1]).
struct ClassDensity {
  std::vector<double> breaks;
  std::vector<double> heights;
};

// Training draws of a 1-D family in structure-of-arrays form.
struct IntervalDraws {
  std::vector<double> location;
  std::vector<double> z;
  std::vector<std::uint8_t> label;
};

// A labeled metric measure space (X, ρ, μ, η). Immutable.
class DistributionInstance {
 public:
  static DistributionInstance finite_atomic(MetricSpace space, std::vector<double> mass,
                                            std::vector<double> eta);
  static DistributionInstance piecewise_uniform(ClassDensity class0, ClassDensity class1,
                                                double prior1);
  static DistributionInstance power_margin(double gamma);

  Family family() const { return family_; }
  const MetricSpace& space() const { return space_; }
  bool is_interval() const { return std::holds_alternative<IntervalModel>(model_); }
  const AtomicModel& atomic() const;
  const IntervalModel& interval() const;
  double gamma() const { return gamma_; }

  // n i.i.d. draws (X ~ μ, Z ~ U[0,1), Y ~ Bernoulli(η(X))); three uniforms
  // per draw in that order.
  std::vector<AugmentedSample> sample_labeled(std::uint64_t seed, std::size_t n) const;
  // Same stream as sample_labeled, 1-D families only.
  IntervalDraws sample_interval(std::uint64_t seed, std::size_t n) const;
  Point sample_point(Rng& rng) const;

  MassQueryResult ball_mass(const Point& x, double r, BallKind kind) const;
  double prob_radius(const Point& x, double p) const;
  double eta_point(const Point& x) const;
  MassQueryResult eta_ball(const Point& x, double r, BallKind kind, double z_cut = 0.0) const;
  bool in_support(const Point& x) const;
  double bayes_risk() const;

  // Class-conditional densities and prior (PiecewiseUniform1D only).
  const ClassDensity& class_density(int label) const { return classes_[label]; }
  double prior1() const { return prior1_; }

 private:
  DistributionInstance(Family family, MetricSpace space) : family_(family), space_(std::move(space)) {}

  Family family_;
  MetricSpace space_;
  std::variant<AtomicModel, IntervalModel> model_ = AtomicModel{};
  std::vector<double> atom_cumulative_;
  double gamma_ = 1.0;
  ClassDensity classes_[2];
  double prior1_ = 0.5;
};

}  // namespace nnrates
