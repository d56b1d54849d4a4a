#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "nnrates/distributions.hpp"

namespace nnrates {

enum class Region { InteriorPlus, InteriorMinus, Boundary, NotInSupport };

std::string to_string(Region region);

struct RegionVerdict {
  Region verdict = Region::Boundary;
  // A radius r ≤ r_p(x) at which the ball average fails the interior test.
  std::optional<double> binding_radius;
};

enum class Side { Plus, Minus, None };

std::string to_string(Side side);

struct HighErrorVerdict {
  bool verdict = false;
  Side side = Side::None;
};

// Membership of x in X+_{p,Δ}, X−_{p,Δ} or ∂_{p,Δ}. The "for all r ≤ r_p(x)"
// condition is decided exactly: on atomic spaces the ball only changes at
// atom distances, and on the 1-D families r ↦ ∫_{B(x,r)} (η − c) dμ has a
// monotone derivative between the radii where x ± r crosses a segment end,
// so its extremes lie at those radii or at a bracketed critical point.
RegionVerdict region_classify(const DistributionInstance& dist, const Point& x, double p,
                              double delta);

// μ(∂_{p,Δ}).
MassQueryResult boundary_measure(const DistributionInstance& dist, double p, double delta);

// Membership of x in the high-error set E_{n,k}; requires 1 ≤ k < n.
HighErrorVerdict high_error_classify(const DistributionInstance& dist, const Point& x,
                                     std::size_t n, std::size_t k);

// μ(E_{n,k}).
MassQueryResult high_error_measure(const DistributionInstance& dist, std::size_t n,
                                   std::size_t k);

// μ({x : |η(x) − 1/2| ≤ t}).
double margin_mass(const DistributionInstance& dist, double t);

struct SmoothnessProbe {
  Point x;
  double r = 0.0;
};

struct SmoothnessViolation {
  Point x;
  double r = 0.0;
  double amount = 0.0;  // |η(B(x,r)) − η(x)| − L μ(B°(x,r))^α
};

// Checks |η(B(x,r)) − η(x)| ≤ L μ(B°(x,r))^α at every probe; returns the first
// violation, or nothing when all probes pass. Probes outside supp(μ) are skipped.
std::optional<SmoothnessViolation> smoothness_audit(const DistributionInstance& dist,
                                                    double alpha, double L,
                                                    const std::vector<SmoothnessProbe>& probes);

// Largest ratio |η(B(x,r)) − η(x)| / μ(B°(x,r))^α over the probes with
// μ(B°) > 0: the smallest L for which the audit passes on them.
double smoothness_constant(const DistributionInstance& dist, double alpha,
                           const std::vector<SmoothnessProbe>& probes);

}  // namespace nnrates
