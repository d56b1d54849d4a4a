#include "nnrates/boundary.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include "nnrates/errors.hpp"

namespace nnrates {

std::string to_string(Region region) {
  switch (region) {
    case Region::InteriorPlus: return "InteriorPlus";
    case Region::InteriorMinus: return "InteriorMinus";
    case Region::Boundary: return "Boundary";
    case Region::NotInSupport: return "NotInSupport";
  }
  return "Boundary";
}

std::string to_string(Side side) {
  switch (side) {
    case Side::Plus: return "plus";
    case Side::Minus: return "minus";
    case Side::None: return "none";
  }
  return "none";
}

namespace {

// Slack for comparing ball averages against thresholds; absorbs rounding in
// the closed-form integrals.
constexpr double kAverageTolerance = 1e-12;
// Width at which measure bisection stops.
constexpr double kBracket = 1e-12;

// Is s·(η(B(x,r)) − c) ≥ 0 for every r in [r_lo, r_hi]? Returns a radius
// where it fails. s = +1 asks for "≥ c", s = −1 for "≤ c".
std::optional<double> interval_violation(const IntervalModel& m, double x, double c, int s,
                                         double r_lo, double r_hi) {
  auto check = [&](double r) -> bool {
    const double mass = m.mass(x - r, x + r);
    if (!(mass > 0.0)) return false;
    return s * (m.eta_integral(x - r, x + r) / mass - c) < -kAverageTolerance;
  };

  std::vector<double> radii{r_lo, r_hi};
  for (double b : m.breakpoints()) {
    const double r = std::abs(x - b);
    if (r > r_lo && r < r_hi) radii.push_back(r);
  }
  std::sort(radii.begin(), radii.end());
  radii.erase(std::unique(radii.begin(), radii.end()), radii.end());

  const auto segs = m.segments();
  for (std::size_t i = 0; i < radii.size(); ++i) {
    const double r1 = radii[i];
    if (r1 > 0.0 && check(r1)) return r1;
    if (i + 1 == radii.size()) break;
    const double r2 = radii[i + 1];
    // Within (r1, r2) neither x + r nor x − r crosses a segment end, so
    // G(r) = ∫_{B(x,r)} (η − c) dμ has derivative
    //   f₊ (η(x + r) − c) + f₋ (η(x − r) − c),
    // which is monotone there. A sign change from − to + of s·G' brackets the
    // only interior minimum of s·G.
    const double mid = 0.5 * (r1 + r2);
    const bool right = x + mid <= 1.0;
    const bool left = x - mid >= 0.0;
    const std::size_t jr = right ? m.segment_index(x + mid) : 0;
    const std::size_t jl = left ? m.segment_index(x - mid) : 0;
    auto slope = [&](double r) {
      double g = 0.0;
      if (right) g += segs[jr].density * (m.eta_on(jr, x + r) - c);
      if (left) g += segs[jl].density * (m.eta_on(jl, x - r) - c);
      return s * g;
    };
    double a = r1, b = r2;
    if (!(slope(a) < 0.0 && slope(b) > 0.0)) continue;
    for (int it = 0; it < 200 && b - a > 0.0; ++it) {
      const double h = 0.5 * (a + b);
      if (h <= a || h >= b) break;
      if (slope(h) < 0.0) a = h;
      else b = h;
    }
    for (double r : {a, b}) {
      if (r > 0.0 && check(r)) return r;
    }
  }
  return std::nullopt;
}

// Atomic analogue: balls only change at atom distances.
std::optional<double> atomic_violation(const DistributionInstance& dist, std::size_t i, double c,
                                       int s, double r_lo, double r_hi) {
  const auto& a = dist.atomic();
  std::vector<double> radii{r_lo};
  for (std::size_t j = 0; j < a.mass.size(); ++j) {
    const double d = dist.space().distance(AtomId{i}, AtomId{j});
    if (d > r_lo && d <= r_hi) radii.push_back(d);
  }
  std::sort(radii.begin(), radii.end());
  radii.erase(std::unique(radii.begin(), radii.end()), radii.end());
  for (double r : radii) {
    double mass = 0.0, integral = 0.0;
    for (std::size_t j = 0; j < a.mass.size(); ++j) {
      if (dist.space().distance(AtomId{i}, AtomId{j}) <= r) {
        mass += a.mass[j];
        integral += a.mass[j] * a.eta[j];
      }
    }
    if (mass > 0.0 && s * (integral / mass - c) < -kAverageTolerance) return r;
  }
  return std::nullopt;
}

std::optional<double> violation(const DistributionInstance& dist, const Point& x, double c, int s,
                                double r_lo, double r_hi) {
  if (dist.is_interval()) {
    return interval_violation(dist.interval(), std::get<double>(x), c, s, r_lo, r_hi);
  }
  return atomic_violation(dist, std::get<AtomId>(x).index, c, s, r_lo, r_hi);
}

void check_region_args(double p, double delta) {
  if (!(p > 0.0 && p <= 1.0)) throw ArgumentError("p must lie in (0,1]");
  if (!(delta >= 0.0 && delta <= 0.5)) throw ArgumentError("Δ must lie in [0,1/2]");
}

void check_nk(std::size_t n, std::size_t k) {
  if (k < 1 || k >= n) throw ArgumentError("need 1 <= k < n");
}

// μ of {x : bad(category(x))} on a 1-D family. Categories are evaluated on a
// grid refined geometrically around segment ends; every grid cell whose end
// categories differ is bisected to kBracket, and the masses of those final
// brackets make up the error bound.
MassQueryResult interval_measure(const IntervalModel& m, const std::function<int(double)>& category,
                                 const std::function<bool(int)>& bad) {
  constexpr int kCells = 4096;
  std::vector<double> grid;
  grid.reserve(kCells + 200);
  for (int i = 0; i <= kCells; ++i) grid.push_back(static_cast<double>(i) / kCells);
  for (double b : m.breakpoints()) {
    grid.push_back(b);
    for (int j = 2; j <= 44; ++j) {
      const double off = std::ldexp(1.0, -j);
      if (b - off > 0.0) grid.push_back(b - off);
      if (b + off < 1.0) grid.push_back(b + off);
    }
  }
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

  MassQueryResult out;
  std::function<void(double, int, double, int)> resolve = [&](double lo, int clo, double hi,
                                                              int chi) {
    if (clo == chi) {
      if (bad(clo)) out.value += m.mass(lo, hi);
      return;
    }
    const double mid = 0.5 * (lo + hi);
    if (hi - lo <= kBracket || mid <= lo || mid >= hi) {
      if (bad(clo)) out.value += m.mass(lo, mid);
      if (bad(chi)) out.value += m.mass(mid, hi);
      if (bad(clo) != bad(chi)) out.error_bound += m.mass(lo, hi);
      return;
    }
    const int cmid = category(mid);
    resolve(lo, clo, mid, cmid);
    resolve(mid, cmid, hi, chi);
  };

  int prev = category(grid[0]);
  for (std::size_t i = 1; i < grid.size(); ++i) {
    const int cur = category(grid[i]);
    resolve(grid[i - 1], prev, grid[i], cur);
    prev = cur;
  }
  out.value = std::min(1.0, std::max(0.0, out.value));
  return out;
}

}  // namespace

RegionVerdict region_classify(const DistributionInstance& dist, const Point& x, double p,
                              double delta) {
  check_region_args(p, delta);
  if (!dist.in_support(x)) return {Region::NotInSupport, std::nullopt};
  const double eta = dist.eta_point(x);
  if (eta == 0.5) return {Region::Boundary, 0.0};
  const double rp = dist.prob_radius(x, p);
  if (eta > 0.5) {
    const auto bad = violation(dist, x, 0.5 + delta, +1, 0.0, rp);
    return bad ? RegionVerdict{Region::Boundary, bad} : RegionVerdict{Region::InteriorPlus, std::nullopt};
  }
  const auto bad = violation(dist, x, 0.5 - delta, -1, 0.0, rp);
  return bad ? RegionVerdict{Region::Boundary, bad} : RegionVerdict{Region::InteriorMinus, std::nullopt};
}

MassQueryResult boundary_measure(const DistributionInstance& dist, double p, double delta) {
  check_region_args(p, delta);
  if (!dist.is_interval()) {
    const auto& a = dist.atomic();
    double total = 0.0;
    for (std::size_t j = 0; j < a.mass.size(); ++j) {
      if (a.mass[j] > 0.0 && region_classify(dist, AtomId{j}, p, delta).verdict == Region::Boundary) {
        total += a.mass[j];
      }
    }
    return {std::min(1.0, total), 0.0};
  }
  return interval_measure(
      dist.interval(),
      [&](double x) { return static_cast<int>(region_classify(dist, x, p, delta).verdict); },
      [](int c) {
        return c == static_cast<int>(Region::Boundary) || c == static_cast<int>(Region::NotInSupport);
      });
}

HighErrorVerdict high_error_classify(const DistributionInstance& dist, const Point& x,
                                     std::size_t n, std::size_t k) {
  check_nk(n, k);
  if (!dist.in_support(x)) return {false, Side::None};
  const double eta = dist.eta_point(x);
  if (eta == 0.5) return {false, Side::None};
  const double kd = static_cast<double>(k);
  const double nd = static_cast<double>(n);
  const double r_lo = dist.prob_radius(x, kd / nd);
  const double r_hi = dist.prob_radius(x, std::min(1.0, (kd + std::sqrt(kd) + 1.0) / nd));
  const double band = 1.0 / std::sqrt(kd);
  if (eta > 0.5) {
    if (!violation(dist, x, 0.5 + band, -1, r_lo, r_hi)) return {true, Side::Plus};
  } else {
    if (!violation(dist, x, 0.5 - band, +1, r_lo, r_hi)) return {true, Side::Minus};
  }
  return {false, Side::None};
}

MassQueryResult high_error_measure(const DistributionInstance& dist, std::size_t n,
                                   std::size_t k) {
  check_nk(n, k);
  if (!dist.is_interval()) {
    const auto& a = dist.atomic();
    double total = 0.0;
    for (std::size_t j = 0; j < a.mass.size(); ++j) {
      if (a.mass[j] > 0.0 && high_error_classify(dist, AtomId{j}, n, k).verdict) total += a.mass[j];
    }
    return {std::min(1.0, total), 0.0};
  }
  return interval_measure(
      dist.interval(),
      [&](double x) { return static_cast<int>(high_error_classify(dist, x, n, k).side); },
      [](int c) { return c != static_cast<int>(Side::None); });
}

double margin_mass(const DistributionInstance& dist, double t) {
  if (!(t >= 0.0)) throw ArgumentError("margin_mass: t must be nonnegative");
  if (t >= 0.5) return 1.0;
  if (!dist.is_interval()) {
    const auto& a = dist.atomic();
    double total = 0.0;
    for (std::size_t j = 0; j < a.mass.size(); ++j) {
      if (std::abs(a.eta[j] - 0.5) <= t + kAverageTolerance) total += a.mass[j];
    }
    return std::min(1.0, total);
  }
  const IntervalModel& m = dist.interval();
  double total = 0.0;
  for (const Segment& s : m.segments()) {
    switch (s.shape) {
      case EtaShape::Constant:
        if (std::abs(s.value - 0.5) <= t + kAverageTolerance) total += s.density * (s.hi - s.lo);
        break;
      case EtaShape::PowerBelow:
      case EtaShape::PowerAbove: {
        // ½|2x − 1|^γ ≤ t  ⇔  |x − ½| ≤ (2t)^{1/γ}/2.
        const double half = 0.5 * std::min(1.0, std::pow(2.0 * t, 1.0 / s.gamma));
        const double lo = std::max(s.lo, 0.5 - half);
        const double hi = std::min(s.hi, 0.5 + half);
        if (hi > lo) total += s.density * (hi - lo);
        break;
      }
    }
  }
  return std::min(1.0, total);
}

namespace {

struct ProbeGap {
  double diff;       // |η(B(x,r)) − η(x)|
  double open_mass;  // μ(B°(x,r))
};

// Smoothness only constrains points of supp(μ); other probes are skipped.
std::optional<ProbeGap> probe_gap(const DistributionInstance& dist, const SmoothnessProbe& probe) {
  if (!dist.in_support(probe.x)) return std::nullopt;
  const double ball = dist.eta_ball(probe.x, probe.r, BallKind::Closed).value;
  return ProbeGap{std::abs(ball - dist.eta_point(probe.x)), dist.ball_mass(probe.x, probe.r, BallKind::Open).value};
}

}  // namespace

std::optional<SmoothnessViolation> smoothness_audit(const DistributionInstance& dist,
                                                    double alpha, double L,
                                                    const std::vector<SmoothnessProbe>& probes) {
  if (!(alpha > 0.0) || !(L > 0.0)) throw ArgumentError("α and L must be positive");
  for (const auto& probe : probes) {
    const auto g = probe_gap(dist, probe);
    if (!g) continue;
    const double amount = g->diff - L * std::pow(g->open_mass, alpha);
    if (amount > kAverageTolerance) return SmoothnessViolation{probe.x, probe.r, amount};
  }
  return std::nullopt;
}

double smoothness_constant(const DistributionInstance& dist, double alpha,
                           const std::vector<SmoothnessProbe>& probes) {
  if (!(alpha > 0.0)) throw ArgumentError("α must be positive");
  double worst = 0.0;
  for (const auto& probe : probes) {
    const auto g = probe_gap(dist, probe);
    if (!g || g->diff <= kAverageTolerance) continue;
    if (!(g->open_mass > 0.0)) return std::numeric_limits<double>::infinity();
    worst = std::max(worst, g->diff / std::pow(g->open_mass, alpha));
  }
  return worst;
}

}  // namespace nnrates
