#pragma once

#include <algorithm>
#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "nnrates/errors.hpp"

namespace nnrates {

// Index of an atom in a finite metric space.
struct AtomId {
  std::size_t index = 0;
  friend bool operator==(const AtomId&, const AtomId&) = default;
};

// A point of one of the supported domains: an atom of a finite space, a real
// in an interval, or a coordinate vector in a box.
using Point = std::variant<AtomId, double, std::vector<double>>;

// Symmetric m×m distance matrix, row-major.
class DistanceMatrix {
 public:
  DistanceMatrix() = default;
  DistanceMatrix(std::size_t size, std::vector<double> entries);

  std::size_t size() const { return size_; }
  double operator()(std::size_t i, std::size_t j) const {
    return entries_[i * size_ + j];
  }

 private:
  std::size_t size_ = 0;
  std::vector<double> entries_;
};

// Reads the text format: atom count m on the first line, then m rows of m
// whitespace-separated decimals.
DistanceMatrix read_distance_matrix(std::istream& in);
DistanceMatrix load_distance_matrix(const std::string& path);

// A metric space (X, ρ). Distances can be scaled by a positive constant,
// which the neighbor order must be invariant under.
class MetricSpace {
 public:
  enum class Kind { Finite, Interval, Box };

  // Validates symmetry, zero diagonal, positive off-diagonal entries and the
  // triangle inequality on all triples.
  static MetricSpace finite(DistanceMatrix distances);
  static MetricSpace interval(double lo, double hi);
  static MetricSpace box(std::vector<double> lo, std::vector<double> hi);

  Kind kind() const { return kind_; }
  bool contains(const Point& p) const;
  double distance(const Point& a, const Point& b) const;

  MetricSpace scaled(double factor) const;
  double scale() const { return scale_; }

  // Finite spaces only.
  std::size_t atom_count() const { return matrix_.size(); }
  const DistanceMatrix& matrix() const { return matrix_; }

  // Interval and box bounds (interval: one coordinate).
  const std::vector<double>& lower() const { return lo_; }
  const std::vector<double>& upper() const { return hi_; }

 private:
  MetricSpace() = default;

  Kind kind_ = Kind::Interval;
  double scale_ = 1.0;
  DistanceMatrix matrix_;
  std::vector<double> lo_;
  std::vector<double> hi_;
};

// A training location with its tie-break value z ∈ [0,1).
struct AugmentedPoint {
  Point location;
  double z = 0.0;
  std::size_t source_index = 0;
};

// B'(center, radius, z_cut): the open ball plus the sphere points whose z is
// below z_cut.
struct AugmentedBall {
  Point center;
  double radius = 0.0;
  double z_cut = 0.0;
};

bool augmented_ball_contains(const AugmentedBall& ball, const AugmentedPoint& p,
                             const MetricSpace& space);

// Sort key for the neighbor order: (distance, z, source_index).
struct NeighborKey {
  double distance;
  double z;
  std::size_t source_index;
  std::size_t position;

  friend bool operator<(const NeighborKey& a, const NeighborKey& b) {
    if (a.distance != b.distance) return a.distance < b.distance;
    if (a.z != b.z) return a.z < b.z;
    return a.source_index < b.source_index;
  }
};

// Positions of the first `count` items of the neighbor order of `query`,
// in order. `proj` maps an item to its AugmentedPoint.
template <class Item, class Proj>
std::vector<std::size_t> nearest_positions(const MetricSpace& space,
                                           const Point& query,
                                           std::span<const Item> items,
                                           std::size_t count, Proj proj) {
  if (items.empty()) throw ArgumentError("neighbor order of an empty training list");
  count = std::min(count, items.size());
  std::vector<NeighborKey> keys;
  keys.reserve(items.size());
  for (std::size_t i = 0; i < items.size(); ++i) {
    const AugmentedPoint& p = proj(items[i]);
    keys.push_back({space.distance(query, p.location), p.z, p.source_index, i});
  }
  if (count < keys.size()) {
    std::nth_element(keys.begin(), keys.begin() + static_cast<std::ptrdiff_t>(count),
                     keys.end());
  }
  std::sort(keys.begin(), keys.begin() + static_cast<std::ptrdiff_t>(count));
  std::vector<std::size_t> out(count);
  for (std::size_t i = 0; i < count; ++i) out[i] = keys[i].position;
  return out;
}

// Full neighbor order of `query` over `training` (positions in the input).
std::vector<std::size_t> neighbor_order(const MetricSpace& space, const Point& query,
                                        std::span<const AugmentedPoint> training);

}  // namespace nnrates
