#include "nnrates/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace nnrates {

namespace {

constexpr double kMassTolerance = 1e-12;

double clamp01(double v) { return std::min(1.0, std::max(0.0, v)); }

// ∫_a^b t^γ dt for 0 ≤ a ≤ b, via the antiderivative t^{γ+1}/(γ+1).
double power_integral(double a, double b, double gamma) {
  a = std::max(0.0, a);
  b = std::max(0.0, b);
  return (std::pow(b, gamma + 1.0) - std::pow(a, gamma + 1.0)) / (gamma + 1.0);
}

const std::vector<double>& checked_density(const ClassDensity& c, const char* name) {
  if (c.breaks.size() < 2 || c.heights.size() + 1 != c.breaks.size()) {
    throw ArgumentError(std::string(name) + ": need breaks.size() == heights.size() + 1 >= 2");
  }
  if (c.breaks.front() != 0.0 || c.breaks.back() != 1.0) {
    throw ArgumentError(std::string(name) + ": breaks must start at 0 and end at 1");
  }
  double total = 0.0;
  for (std::size_t i = 0; i < c.heights.size(); ++i) {
    if (!(c.breaks[i] < c.breaks[i + 1])) {
      throw ArgumentError(std::string(name) + ": breaks must be strictly increasing");
    }
    if (!(c.heights[i] >= 0.0) || !std::isfinite(c.heights[i])) {
      throw ArgumentError(std::string(name) + ": heights must be finite and nonnegative");
    }
    total += c.heights[i] * (c.breaks[i + 1] - c.breaks[i]);
  }
  if (std::abs(total - 1.0) > kMassTolerance) {
    throw ArgumentError(std::string(name) + ": density integrates to " + std::to_string(total));
  }
  return c.breaks;
}

double height_at(const ClassDensity& c, double x) {
  auto it = std::upper_bound(c.breaks.begin(), c.breaks.end(), x);
  auto i = static_cast<std::size_t>(std::distance(c.breaks.begin(), it));
  if (i == 0) return c.heights.front();
  return c.heights[std::min(i - 1, c.heights.size() - 1)];
}

}  // namespace

std::string to_string(Family family) {
  switch (family) {
    case Family::FiniteAtomic: return "finite_atomic";
    case Family::PiecewiseUniform1D: return "piecewise_uniform";
    case Family::PowerMargin1D: return "power_margin";
  }
  return "unknown";
}

// ---------------------------------------------------------------------------
// IntervalModel

IntervalModel::IntervalModel(std::vector<Segment> segments) : segments_(std::move(segments)) {
  if (segments_.empty()) throw ArgumentError("interval model needs a segment");
  if (segments_.front().lo != 0.0 || segments_.back().hi != 1.0) {
    throw ArgumentError("interval model segments must cover [0,1]");
  }
  double total = 0.0;
  for (std::size_t j = 0; j < segments_.size(); ++j) {
    const Segment& s = segments_[j];
    if (!(s.lo < s.hi)) throw ArgumentError("empty segment");
    if (j > 0 && s.lo != segments_[j - 1].hi) throw ArgumentError("segments must be contiguous");
    if (!(s.density >= 0.0)) throw ArgumentError("negative density");
    if (s.shape == EtaShape::Constant && !(s.value >= 0.0 && s.value <= 1.0)) {
      throw ArgumentError("η must lie in [0,1]");
    }
    if (s.shape != EtaShape::Constant && !(s.gamma > 0.0)) {
      throw ArgumentError("power exponent must be positive");
    }
    total += s.density * (s.hi - s.lo);
    cumulative_.push_back(total);
  }
  if (std::abs(total - 1.0) > kMassTolerance) {
    throw ArgumentError("interval model mass is " + std::to_string(total) + ", expected 1");
  }
}

std::size_t IntervalModel::segment_index(double x) const {
  std::size_t lo = 0;
  std::size_t hi = segments_.size();
  while (hi - lo > 1) {
    std::size_t mid = (lo + hi) / 2;
    if (segments_[mid].lo <= x) lo = mid;
    else hi = mid;
  }
  return lo;
}

std::size_t IntervalModel::segment_index_left(double x) const {
  std::size_t j = segment_index(x);
  if (j > 0 && segments_[j].lo >= x) --j;
  return j;
}

double IntervalModel::eta_on(std::size_t j, double x) const {
  const Segment& s = segments_[j];
  switch (s.shape) {
    case EtaShape::Constant: return s.value;
    case EtaShape::PowerBelow: return 0.5 - 0.5 * std::pow(std::max(0.0, 1.0 - 2.0 * x), s.gamma);
    case EtaShape::PowerAbove: return 0.5 + 0.5 * std::pow(std::max(0.0, 2.0 * x - 1.0), s.gamma);
  }
  return s.value;
}

Label IntervalModel::bayes_label(std::size_t j) const {
  const Segment& s = segments_[j];
  switch (s.shape) {
    case EtaShape::Constant: return s.value >= 0.5 ? 1 : 0;
    case EtaShape::PowerBelow: return 0;
    case EtaShape::PowerAbove: return 1;
  }
  return 0;
}

namespace {

// Applies f(segment, lo, hi) to every nonempty overlap of [a, b] with a segment.
template <class F>
double accumulate_overlaps(std::span<const Segment> segs, double a, double b, F f) {
  a = std::max(a, 0.0);
  b = std::min(b, 1.0);
  double sum = 0.0;
  if (!(a < b)) return sum;
  for (const Segment& s : segs) {
    if (s.hi <= a) continue;
    if (s.lo >= b) break;
    const double lo = std::max(a, s.lo);
    const double hi = std::min(b, s.hi);
    if (lo < hi && s.density > 0.0) sum += f(s, lo, hi);
  }
  return sum;
}

double segment_eta_integral(const Segment& s, double lo, double hi) {
  switch (s.shape) {
    case EtaShape::Constant: return s.density * s.value * (hi - lo);
    case EtaShape::PowerAbove:
      return s.density *
             (0.5 * (hi - lo) + 0.25 * power_integral(2.0 * lo - 1.0, 2.0 * hi - 1.0, s.gamma));
    case EtaShape::PowerBelow:
      return s.density *
             (0.5 * (hi - lo) - 0.25 * power_integral(1.0 - 2.0 * hi, 1.0 - 2.0 * lo, s.gamma));
  }
  return 0.0;
}

double segment_abs_margin(const Segment& s, double lo, double hi) {
  switch (s.shape) {
    case EtaShape::Constant: return s.density * std::abs(1.0 - 2.0 * s.value) * (hi - lo);
    case EtaShape::PowerAbove:
      return s.density * 0.5 * power_integral(2.0 * lo - 1.0, 2.0 * hi - 1.0, s.gamma);
    case EtaShape::PowerBelow:
      return s.density * 0.5 * power_integral(1.0 - 2.0 * hi, 1.0 - 2.0 * lo, s.gamma);
  }
  return 0.0;
}

}  // namespace

double IntervalModel::mass(double a, double b) const {
  return accumulate_overlaps(segments_, a, b,
                             [](const Segment& s, double lo, double hi) { return s.density * (hi - lo); });
}

double IntervalModel::eta_integral(double a, double b) const {
  return accumulate_overlaps(segments_, a, b, segment_eta_integral);
}

double IntervalModel::abs_margin_integral(double a, double b) const {
  return accumulate_overlaps(segments_, a, b, segment_abs_margin);
}

double IntervalModel::mass_where_bayes(double a, double b, Label label) const {
  return accumulate_overlaps(segments_, a, b, [&](const Segment& s, double lo, double hi) {
    const std::size_t j = static_cast<std::size_t>(&s - segments_.data());
    return bayes_label(j) == label ? s.density * (hi - lo) : 0.0;
  });
}

double IntervalModel::abs_margin_where_bayes(double a, double b, Label label) const {
  return accumulate_overlaps(segments_, a, b, [&](const Segment& s, double lo, double hi) {
    const std::size_t j = static_cast<std::size_t>(&s - segments_.data());
    return bayes_label(j) == label ? segment_abs_margin(s, lo, hi) : 0.0;
  });
}

double IntervalModel::quantile(double u) const {
  auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
  std::size_t j = static_cast<std::size_t>(std::distance(cumulative_.begin(), it));
  if (j >= segments_.size()) {
    // u at or beyond the total mass: last positive-density segment's end.
    j = segments_.size() - 1;
    while (j > 0 && segments_[j].density == 0.0) --j;
    return segments_[j].hi;
  }
  const Segment& s = segments_[j];
  const double before = j == 0 ? 0.0 : cumulative_[j - 1];
  const double x = s.lo + (u - before) / s.density;
  return std::min(s.hi, std::max(s.lo, x));
}

double IntervalModel::max_density() const {
  double m = 0.0;
  for (const auto& s : segments_) m = std::max(m, s.density);
  return m;
}

std::vector<double> IntervalModel::breakpoints() const {
  std::vector<double> b;
  b.reserve(segments_.size() + 1);
  for (const auto& s : segments_) b.push_back(s.lo);
  b.push_back(1.0);
  return b;
}

// ---------------------------------------------------------------------------
// DistributionInstance construction

DistributionInstance DistributionInstance::finite_atomic(MetricSpace space, std::vector<double> mass,
                                                         std::vector<double> eta) {
  if (space.kind() != MetricSpace::Kind::Finite) {
    throw ArgumentError("finite_atomic needs a finite metric space");
  }
  const std::size_t m = space.atom_count();
  if (mass.size() != m || eta.size() != m) {
    throw ArgumentError("finite_atomic: mass/eta length must equal the atom count");
  }
  double total = 0.0;
  std::vector<double> cumulative;
  for (std::size_t i = 0; i < m; ++i) {
    if (!(mass[i] >= 0.0) || !std::isfinite(mass[i])) throw ArgumentError("atom mass must be nonnegative");
    if (!(eta[i] >= 0.0 && eta[i] <= 1.0)) throw ArgumentError("atom η must lie in [0,1]");
    total += mass[i];
    cumulative.push_back(total);
  }
  if (std::abs(total - 1.0) > kMassTolerance) {
    throw ArgumentError("atom masses sum to " + std::to_string(total) + ", expected 1");
  }
  DistributionInstance d(Family::FiniteAtomic, std::move(space));
  d.model_ = AtomicModel{std::move(mass), std::move(eta)};
  d.atom_cumulative_ = std::move(cumulative);
  return d;
}

DistributionInstance DistributionInstance::piecewise_uniform(ClassDensity class0, ClassDensity class1,
                                                             double prior1) {
  if (!(prior1 >= 0.0 && prior1 <= 1.0)) throw ArgumentError("prior1 must lie in [0,1]");
  const auto& b0 = checked_density(class0, "class0");
  const auto& b1 = checked_density(class1, "class1");
  std::vector<double> breaks;
  std::set_union(b0.begin(), b0.end(), b1.begin(), b1.end(), std::back_inserter(breaks));
  breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());

  std::vector<Segment> segs;
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    const double mid = 0.5 * (breaks[i] + breaks[i + 1]);
    const double f0 = (1.0 - prior1) * height_at(class0, mid);
    const double f1 = prior1 * height_at(class1, mid);
    Segment s;
    s.lo = breaks[i];
    s.hi = breaks[i + 1];
    s.density = f0 + f1;
    s.value = s.density > 0.0 ? clamp01(f1 / s.density) : -1.0;
    segs.push_back(s);
  }
  // Zero-density segments report η of the nearest positive-density segment
  // (left one on ties); such points are never in the support.
  for (std::size_t i = 0; i < segs.size(); ++i) {
    if (segs[i].density > 0.0) continue;
    double best = 2.0;
    double value = 0.5;
    for (std::size_t j = 0; j < segs.size(); ++j) {
      if (segs[j].density <= 0.0) continue;
      const double gap = j < i ? segs[i].lo - segs[j].hi : segs[j].lo - segs[i].hi;
      if (gap < best) {
        best = gap;
        value = segs[j].value;
      }
    }
    segs[i].value = value;
  }
  DistributionInstance d(Family::PiecewiseUniform1D, MetricSpace::interval(0.0, 1.0));
  d.model_ = IntervalModel(std::move(segs));
  d.classes_[0] = std::move(class0);
  d.classes_[1] = std::move(class1);
  d.prior1_ = prior1;
  return d;
}

DistributionInstance DistributionInstance::power_margin(double gamma) {
  if (!(gamma > 0.0) || !std::isfinite(gamma)) throw ArgumentError("power_margin: γ must be positive");
  Segment below{0.0, 0.5, 1.0, EtaShape::PowerBelow, 0.5, gamma};
  Segment above{0.5, 1.0, 1.0, EtaShape::PowerAbove, 0.5, gamma};
  DistributionInstance d(Family::PowerMargin1D, MetricSpace::interval(0.0, 1.0));
  d.model_ = IntervalModel({below, above});
  d.gamma_ = gamma;
  return d;
}

const AtomicModel& DistributionInstance::atomic() const {
  if (const auto* a = std::get_if<AtomicModel>(&model_)) return *a;
  throw UnsupportedError("distribution is not finite_atomic");
}

const IntervalModel& DistributionInstance::interval() const {
  if (const auto* m = std::get_if<IntervalModel>(&model_)) return *m;
  throw UnsupportedError("distribution is not a 1-D family");
}

// ---------------------------------------------------------------------------
// Sampling

Point DistributionInstance::sample_point(Rng& rng) const {
  const double u = rng.uniform();
  if (const auto* m = std::get_if<IntervalModel>(&model_)) return m->quantile(u);
  auto it = std::upper_bound(atom_cumulative_.begin(), atom_cumulative_.end(), u);
  auto j = static_cast<std::size_t>(std::distance(atom_cumulative_.begin(), it));
  if (j >= atom_cumulative_.size()) {
    j = atom_cumulative_.size() - 1;
    while (j > 0 && atomic().mass[j] == 0.0) --j;
  }
  return AtomId{j};
}

std::vector<AugmentedSample> DistributionInstance::sample_labeled(std::uint64_t seed, std::size_t n) const {
  if (n == 0) throw ArgumentError("sample size must be positive");
  Rng rng(seed);
  std::vector<AugmentedSample> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    AugmentedSample s;
    s.point.location = sample_point(rng);
    s.point.z = rng.uniform();
    s.point.source_index = i;
    s.label = rng.bernoulli(eta_point(s.point.location)) ? 1 : 0;
    out.push_back(std::move(s));
  }
  return out;
}

IntervalDraws DistributionInstance::sample_interval(std::uint64_t seed, std::size_t n) const {
  const IntervalModel& m = interval();
  if (n == 0) throw ArgumentError("sample size must be positive");
  Rng rng(seed);
  IntervalDraws d;
  d.location.resize(n);
  d.z.resize(n);
  d.label.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double x = m.quantile(rng.uniform());
    d.location[i] = x;
    d.z[i] = rng.uniform();
    d.label[i] = rng.bernoulli(m.eta(x)) ? 1 : 0;
  }
  return d;
}

// ---------------------------------------------------------------------------
// Measure queries

namespace {

double as_real(const MetricSpace& space, const Point& x) {
  if (!space.contains(x)) throw DomainError("point outside [0,1]");
  return std::get<double>(x);
}

std::size_t as_atom(const MetricSpace& space, const Point& x) {
  if (!space.contains(x)) throw DomainError("point is not an atom of the space");
  return std::get<AtomId>(x).index;
}

}  // namespace

MassQueryResult DistributionInstance::ball_mass(const Point& x, double r, BallKind kind) const {
  if (!(r >= 0.0)) throw ArgumentError("ball radius must be nonnegative");
  if (const auto* m = std::get_if<IntervalModel>(&model_)) {
    const double c = as_real(space_, x);
    return {clamp01(m->mass(c - r, c + r)), 0.0};
  }
  const std::size_t i = as_atom(space_, x);
  const auto& a = atomic();
  double total = 0.0;
  for (std::size_t j = 0; j < a.mass.size(); ++j) {
    const double d = space_.distance(AtomId{i}, AtomId{j});
    if (d < r || (kind != BallKind::Open && d == r)) total += a.mass[j];
  }
  return {clamp01(total), 0.0};
}

double DistributionInstance::prob_radius(const Point& x, double p) const {
  if (!(p >= 0.0 && p <= 1.0)) throw ArgumentError("prob_radius: p must lie in [0,1]");
  if (p == 0.0) {
    if (!space_.contains(x)) throw DomainError("point outside the domain");
    return 0.0;
  }
  if (const auto* m = std::get_if<IntervalModel>(&model_)) {
    const double c = as_real(space_, x);
    std::vector<double> radii{0.0};
    for (double b : m->breakpoints()) radii.push_back(std::abs(c - b));
    std::sort(radii.begin(), radii.end());
    radii.erase(std::unique(radii.begin(), radii.end()), radii.end());
    double prev_r = 0.0;
    double prev_mass = 0.0;
    for (double r : radii) {
      const double mass = m->mass(c - r, c + r);
      if (mass + kMassTolerance >= p) {
        if (r == 0.0 || mass <= prev_mass) return r;
        // Mass is linear in r between consecutive breakpoint radii.
        const double slope = (mass - prev_mass) / (r - prev_r);
        const double solved = prev_r + (p - prev_mass) / slope;
        return std::min(r, std::max(prev_r, solved));
      }
      prev_r = r;
      prev_mass = mass;
    }
    throw ArgumentError("prob_radius: p exceeds the reachable mass");
  }
  const std::size_t i = as_atom(space_, x);
  const auto& a = atomic();
  std::vector<std::pair<double, double>> by_distance;
  for (std::size_t j = 0; j < a.mass.size(); ++j) {
    by_distance.emplace_back(space_.distance(AtomId{i}, AtomId{j}), a.mass[j]);
  }
  std::sort(by_distance.begin(), by_distance.end());
  double cumulative = 0.0;
  for (std::size_t j = 0; j < by_distance.size(); ++j) {
    cumulative += by_distance[j].second;
    const bool shell_done = j + 1 == by_distance.size() || by_distance[j + 1].first != by_distance[j].first;
    if (shell_done && cumulative + kMassTolerance >= p) return by_distance[j].first;
  }
  throw ArgumentError("prob_radius: p exceeds the reachable mass");
}

double DistributionInstance::eta_point(const Point& x) const {
  if (const auto* m = std::get_if<IntervalModel>(&model_)) return m->eta(as_real(space_, x));
  return atomic().eta[as_atom(space_, x)];
}

MassQueryResult DistributionInstance::eta_ball(const Point& x, double r, BallKind kind, double z_cut) const {
  if (!(r >= 0.0)) throw ArgumentError("ball radius must be nonnegative");
  if (kind == BallKind::Augmented && !(z_cut >= 0.0 && z_cut <= 1.0)) {
    throw ArgumentError("z_cut must lie in [0,1]");
  }
  // (mass, ∫η) of the closed ball and of the open ball.
  double closed_mass = 0.0, closed_int = 0.0, open_mass = 0.0, open_int = 0.0;
  if (const auto* m = std::get_if<IntervalModel>(&model_)) {
    const double c = as_real(space_, x);
    closed_mass = open_mass = m->mass(c - r, c + r);
    closed_int = open_int = m->eta_integral(c - r, c + r);
  } else {
    const std::size_t i = as_atom(space_, x);
    const auto& a = atomic();
    for (std::size_t j = 0; j < a.mass.size(); ++j) {
      const double d = space_.distance(AtomId{i}, AtomId{j});
      if (d <= r) {
        closed_mass += a.mass[j];
        closed_int += a.mass[j] * a.eta[j];
      }
      if (d < r) {
        open_mass += a.mass[j];
        open_int += a.mass[j] * a.eta[j];
      }
    }
  }
  switch (kind) {
    case BallKind::Closed:
      if (!(closed_mass > 0.0)) throw UndefinedValueError("η of a zero-mass closed ball");
      return {clamp01(closed_int / closed_mass), 0.0};
    case BallKind::Open:
      if (!(open_mass > 0.0)) throw UndefinedValueError("η of a zero-mass open ball");
      return {clamp01(open_int / open_mass), 0.0};
    case BallKind::Augmented: {
      // η(B') = [μ(B)ν η(B) + μ(B°)(1−ν) η(B°)] / [μ(B)ν + μ(B°)(1−ν)].
      const double w_closed = closed_mass * z_cut;
      const double w_open = open_mass * (1.0 - z_cut);
      const double denom = w_closed + w_open;
      if (!(denom > 0.0)) throw UndefinedValueError("η of a zero-mass augmented ball");
      double value = 0.0;
      if (w_closed > 0.0) value += (w_closed / denom) * (closed_int / closed_mass);
      if (w_open > 0.0) value += (w_open / denom) * (open_int / open_mass);
      return {clamp01(value), 0.0};
    }
  }
  return {};
}

bool DistributionInstance::in_support(const Point& x) const {
  if (const auto* m = std::get_if<IntervalModel>(&model_)) {
    const double c = as_real(space_, x);
    const auto segs = m->segments();
    if (c < 1.0 && segs[m->segment_index(c)].density > 0.0) return true;
    if (c > 0.0 && segs[m->segment_index_left(c)].density > 0.0) return true;
    return false;
  }
  return atomic().mass[as_atom(space_, x)] > 0.0;
}

double DistributionInstance::bayes_risk() const {
  if (const auto* m = std::get_if<IntervalModel>(&model_)) {
    return 0.5 * (m->mass(0.0, 1.0) - m->abs_margin_integral(0.0, 1.0));
  }
  const auto& a = atomic();
  double r = 0.0;
  for (std::size_t j = 0; j < a.mass.size(); ++j) r += a.mass[j] * std::min(a.eta[j], 1.0 - a.eta[j]);
  return r;
}

}  // namespace nnrates
