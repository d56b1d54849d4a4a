#pragma once

#include "nnrates/distributions.hpp"

namespace nnrates::presets {

// Class 0 uniform on [0, 1/2), class 1 uniform on [1/2, 1], equal priors:
// μ uniform, η = 1(x ≥ 1/2).
DistributionInstance disjoint_support();

// Two atoms at distance 1 with mass 1/2 each, η = 1 and η = 0.
DistributionInstance two_pure_atoms();

// μ with density 5/4 on [0, 0.4] ∪ [0.6, 1]; η = 0.1 on the left piece and 0.9
// on the right (so |η − 1/2| ≥ 0.4 everywhere). (α=1, L=1/2)-smooth.
DistributionInstance gapped_two_level();

// μ uniform on [0,1] with constant η.
DistributionInstance constant_eta(double eta);

}  // namespace nnrates::presets
