#include "nnrates/presets.hpp"

namespace nnrates::presets {

DistributionInstance disjoint_support() {
  return DistributionInstance::piecewise_uniform({{0.0, 0.5, 1.0}, {2.0, 0.0}},
                                                 {{0.0, 0.5, 1.0}, {0.0, 2.0}}, 0.5);
}

DistributionInstance two_pure_atoms() {
  return DistributionInstance::finite_atomic(MetricSpace::finite(DistanceMatrix(2, {0.0, 1.0, 1.0, 0.0})),
                                             {0.5, 0.5}, {1.0, 0.0});
}

DistributionInstance gapped_two_level() {
  return DistributionInstance::piecewise_uniform({{0.0, 0.4, 0.6, 1.0}, {2.25, 0.0, 0.25}},
                                                 {{0.0, 0.4, 0.6, 1.0}, {0.25, 0.0, 2.25}}, 0.5);
}

DistributionInstance constant_eta(double eta) {
  // Class densities both uniform, so η is the prior.
  return DistributionInstance::piecewise_uniform({{0.0, 1.0}, {1.0}}, {{0.0, 1.0}, {1.0}}, eta);
}

}  // namespace nnrates::presets
