#pragma once

#include <vector>

#include "nnrates/distributions.hpp"
#include "nnrates/metric.hpp"

namespace fixtures {

inline nnrates::MetricSpace two_atom_space(double d = 1.0) {
  return nnrates::MetricSpace::finite(nnrates::DistanceMatrix(2, {0.0, d, d, 0.0}));
}

inline nnrates::DistributionInstance two_atoms(double ma, double mb, double ea, double eb) {
  return nnrates::DistributionInstance::finite_atomic(two_atom_space(), {ma, mb}, {ea, eb});
}

// Points on a line at the given coordinates, as a finite space.
inline nnrates::MetricSpace line_space(const std::vector<double>& xs) {
  const std::size_t m = xs.size();
  std::vector<double> d(m * m);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j) d[i * m + j] = xs[i] > xs[j] ? xs[i] - xs[j] : xs[j] - xs[i];
  return nnrates::MetricSpace::finite(nnrates::DistanceMatrix(m, std::move(d)));
}

inline nnrates::AugmentedSample sample(nnrates::Point x, double z, std::size_t idx, int y) {
  return {nnrates::AugmentedPoint{std::move(x), z, idx}, y};
}

}  // namespace fixtures
