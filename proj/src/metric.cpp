#include "nnrates/metric.hpp"

#include <cmath>
#include <fstream>
#include <istream>
#include <sstream>

namespace nnrates {

DistanceMatrix::DistanceMatrix(std::size_t size, std::vector<double> entries)
    : size_(size), entries_(std::move(entries)) {
  if (entries_.size() != size_ * size_) {
    throw ArgumentError("distance matrix has " + std::to_string(entries_.size()) +
                        " entries, expected " + std::to_string(size_ * size_));
  }
}

DistanceMatrix read_distance_matrix(std::istream& in) {
  long long m = 0;
  if (!(in >> m) || m <= 0) throw ArgumentError("distance matrix: bad atom count");
  const auto size = static_cast<std::size_t>(m);
  std::vector<double> entries(size * size);
  for (auto& e : entries) {
    if (!(in >> e)) throw ArgumentError("distance matrix: too few entries");
  }
  std::string rest;
  if (in >> rest) throw ArgumentError("distance matrix: trailing content '" + rest + "'");
  return DistanceMatrix(size, std::move(entries));
}

DistanceMatrix load_distance_matrix(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open metric file " + path);
  return read_distance_matrix(in);
}

MetricSpace MetricSpace::finite(DistanceMatrix d) {
  const std::size_t m = d.size();
  if (m == 0) throw ArgumentError("finite metric space needs at least one atom");
  for (std::size_t i = 0; i < m; ++i) {
    if (d(i, i) != 0.0) throw ArgumentError("distance matrix diagonal must be zero");
    for (std::size_t j = 0; j < m; ++j) {
      if (!std::isfinite(d(i, j))) throw ArgumentError("distance matrix entry not finite");
      if (d(i, j) != d(j, i)) throw ArgumentError("distance matrix is not symmetric");
      if (i != j && !(d(i, j) > 0.0)) {
        throw ArgumentError("distinct atoms must be at positive distance");
      }
    }
  }
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j)
      for (std::size_t k = 0; k < m; ++k)
        if (d(i, k) > d(i, j) + d(j, k) + 1e-12 * (d(i, j) + d(j, k))) {
          throw ArgumentError("distance matrix violates the triangle inequality");
        }
  MetricSpace s;
  s.kind_ = Kind::Finite;
  s.matrix_ = std::move(d);
  return s;
}

MetricSpace MetricSpace::interval(double lo, double hi) {
  if (!(lo < hi)) throw ArgumentError("interval space needs lo < hi");
  MetricSpace s;
  s.kind_ = Kind::Interval;
  s.lo_ = {lo};
  s.hi_ = {hi};
  return s;
}

MetricSpace MetricSpace::box(std::vector<double> lo, std::vector<double> hi) {
  if (lo.empty() || lo.size() != hi.size()) throw ArgumentError("box bounds mismatch");
  for (std::size_t i = 0; i < lo.size(); ++i) {
    if (!(lo[i] < hi[i])) throw ArgumentError("box needs lo < hi in every coordinate");
  }
  MetricSpace s;
  s.kind_ = Kind::Box;
  s.lo_ = std::move(lo);
  s.hi_ = std::move(hi);
  return s;
}

MetricSpace MetricSpace::scaled(double factor) const {
  if (!(factor > 0.0)) throw ArgumentError("metric scale factor must be positive");
  MetricSpace s = *this;
  s.scale_ *= factor;
  return s;
}

bool MetricSpace::contains(const Point& p) const {
  switch (kind_) {
    case Kind::Finite: {
      const auto* a = std::get_if<AtomId>(&p);
      return a != nullptr && a->index < matrix_.size();
    }
    case Kind::Interval: {
      const auto* x = std::get_if<double>(&p);
      return x != nullptr && *x >= lo_[0] && *x <= hi_[0];
    }
    case Kind::Box: {
      const auto* v = std::get_if<std::vector<double>>(&p);
      if (v == nullptr || v->size() != lo_.size()) return false;
      for (std::size_t i = 0; i < lo_.size(); ++i) {
        if (!((*v)[i] >= lo_[i] && (*v)[i] <= hi_[i])) return false;
      }
      return true;
    }
  }
  return false;
}

double MetricSpace::distance(const Point& a, const Point& b) const {
  if (!contains(a) || !contains(b)) throw DomainError("point outside the metric space domain");
  switch (kind_) {
    case Kind::Finite:
      return scale_ * matrix_(std::get<AtomId>(a).index, std::get<AtomId>(b).index);
    case Kind::Interval:
      return scale_ * std::abs(std::get<double>(a) - std::get<double>(b));
    case Kind::Box: {
      const auto& u = std::get<std::vector<double>>(a);
      const auto& v = std::get<std::vector<double>>(b);
      double s = 0.0;
      for (std::size_t i = 0; i < u.size(); ++i) s += (u[i] - v[i]) * (u[i] - v[i]);
      return scale_ * std::sqrt(s);
    }
  }
  return 0.0;
}

bool augmented_ball_contains(const AugmentedBall& ball, const AugmentedPoint& p,
                             const MetricSpace& space) {
  const double d = space.distance(ball.center, p.location);
  return d < ball.radius || (d == ball.radius && p.z < ball.z_cut);
}

std::vector<std::size_t> neighbor_order(const MetricSpace& space, const Point& query,
                                        std::span<const AugmentedPoint> training) {
  return nearest_positions(space, query, training, training.size(),
                           [](const AugmentedPoint& p) -> const AugmentedPoint& { return p; });
}

}  // namespace nnrates
