#include "nnrates/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "nnrates/boundary.hpp"
#include "nnrates/errors.hpp"

namespace nnrates {

namespace {

void check_delta(double delta) {
  if (!(delta > 0.0 && delta < 1.0)) throw ArgumentError("δ must lie in (0,1)");
}

void check_smoothness(const SmoothnessSpec& s) {
  if (!(s.alpha > 0.0) || !(s.L >= 0.0)) throw ArgumentError("need α > 0 and L ≥ 0");
}

}  // namespace

TheoremOneParams theorem1_params(std::size_t n, std::size_t k, double delta) {
  check_delta(delta);
  if (k < 1 || k >= n) throw ArgumentError("need 1 <= k < n");
  const double kd = static_cast<double>(k);
  const double log_term = std::log(2.0 / delta);
  const double slack_sq = 4.0 * log_term / kd;
  if (!(slack_sq < 1.0)) {
    throw InfeasibleError("k=" + std::to_string(k) + " must exceed 4 ln(2/δ) = " +
                          std::to_string(4.0 * log_term));
  }
  TheoremOneParams out;
  out.n = n;
  out.k = k;
  out.delta = delta;
  out.gamma = std::sqrt(slack_sq);
  out.p = (kd / static_cast<double>(n)) / (1.0 - out.gamma);
  out.Delta = std::min(0.5, std::sqrt(log_term / kd));
  return out;
}

ClampedBound misclassification_upper_bound(const DistributionInstance& dist, std::size_t n,
                                           std::size_t k, double delta) {
  const TheoremOneParams t = theorem1_params(n, k, delta);
  if (t.p > 1.0) {
    // No ball needs more than the whole space: every point is in the boundary.
    return {delta + 1.0, 1.0};
  }
  const MassQueryResult b = boundary_measure(dist, t.p, t.Delta);
  const double raw = delta + b.value + b.error_bound;
  return {raw, std::min(1.0, raw)};
}

Thresholds smooth_thresholds(const SmoothnessSpec& s, double p, double Delta, std::size_t n,
                             std::size_t k) {
  check_smoothness(s);
  if (k < 1 || n < 1) throw ArgumentError("need k, n >= 1");
  const double kd = static_cast<double>(k);
  Thresholds t;
  t.upper_band = Delta + s.L * std::pow(p, s.alpha);
  t.lower_band = std::max(
      0.0, 1.0 / std::sqrt(kd) - s.L * std::pow((kd + std::sqrt(kd) + 1.0) / static_cast<double>(n), s.alpha));
  return t;
}

SmoothnessSpec holder_translate(double alpha_h, int d, double L_h, double mu_min) {
  if (!(alpha_h > 0.0) || d < 1 || !(L_h > 0.0) || !(mu_min > 0.0)) {
    throw ArgumentError("holder_translate: all arguments must be positive");
  }
  const double dd = static_cast<double>(d);
  const double v_d = std::pow(std::numbers::pi, dd / 2.0) / std::tgamma(dd / 2.0 + 1.0);
  return {alpha_h / dd, L_h / std::pow(mu_min * v_d, alpha_h / dd)};
}

std::string to_string(RateMode mode) { return mode == RateMode::HighProb ? "highprob" : "expected"; }

MarginRate margin_rate(std::size_t n, std::optional<double> delta, const SmoothnessSpec& s,
                       const MarginSpec& m, double k_o, double C_o) {
  check_smoothness(s);
  if (n < 1) throw ArgumentError("n must be positive");
  if (!(m.beta >= 0.0)) throw ArgumentError("β must be nonnegative");
  if (!(k_o > 0.0) || !(C_o > 0.0)) throw ArgumentError("k_o and C_o must be positive");
  const double a = s.alpha;
  const double nd = static_cast<double>(n);
  const double denom = 2.0 * a + 1.0;
  MarginRate out;
  double k = k_o * std::pow(nd, 2.0 * a / denom);
  if (delta) {
    check_delta(*delta);
    const double log_term = std::log(1.0 / *delta);
    k *= std::pow(log_term, 1.0 / denom);
    out.bound = *delta + C_o * std::pow(log_term / nd, a * m.beta / denom);
    out.mode = RateMode::HighProb;
  } else {
    out.bound = C_o * std::pow(nd, -a * (m.beta + 1.0) / denom);
    out.mode = RateMode::Expected;
  }
  out.k = static_cast<std::size_t>(std::max(1.0, std::round(k)));
  return out;
}

double expected_risk_bound(std::size_t n, std::size_t k, const SmoothnessSpec& s,
                           const MarginSpec& m) {
  check_smoothness(s);
  if (k < 1 || k >= n) throw ArgumentError("need 1 <= k < n");
  const double kd = static_cast<double>(k);
  const double bias = 2.0 * s.L * std::pow(2.0 * kd / static_cast<double>(n), s.alpha);
  const double spread = std::sqrt(8.0 * (m.beta + 2.0) / kd);
  return std::exp(-kd / 8.0) + 6.0 * m.C * std::pow(std::max(bias, spread), m.beta + 1.0);
}

double pointwise_risk_bound(std::size_t k, double delta_x, double delta_o) {
  if (k < 1) throw ArgumentError("k must be positive");
  if (!(delta_x > 0.0 && delta_x <= 0.5)) throw ArgumentError("Δ(x) must lie in (0,1/2]");
  if (!(delta_o >= 0.0)) throw ArgumentError("Δ_o must be nonnegative");
  if (!(delta_x > delta_o)) throw InfeasibleError("pointwise bound needs Δ(x) > Δ_o");
  const double kd = static_cast<double>(k);
  const double gap = delta_x - delta_o;
  return std::exp(-kd / 8.0) + 4.0 * delta_x * std::exp(-2.0 * kd * gap * gap);
}

ExponentialRegime exponential_regime(double delta_star, const SmoothnessSpec& s, std::size_t n) {
  check_smoothness(s);
  if (!(delta_star > 0.0 && delta_star <= 0.5)) throw ArgumentError("Δ* must lie in (0,1/2]");
  if (!(s.L > 0.0)) throw ArgumentError("L must be positive");
  const double ratio = std::pow(delta_star / (2.0 * s.L), 1.0 / s.alpha);
  // The relative nudge keeps exact products such as 500·0.4 from flooring low.
  const double k_real = 0.5 * static_cast<double>(n) * ratio;
  const double k_floor = std::floor(k_real * (1.0 + 1e-12));
  if (k_floor < 1.0) throw InfeasibleError("n too small: (n/2)(Δ*/2L)^{1/α} < 1");
  ExponentialRegime out;
  out.k = static_cast<std::size_t>(k_floor);
  out.delta = 2.0 * std::exp(-k_floor * delta_star * delta_star / 4.0);
  out.C_o = std::pow(delta_star, 2.0 + 1.0 / s.alpha) / (8.0 * std::pow(2.0 * s.L, 1.0 / s.alpha));
  out.bound = 2.0 * std::exp(-out.C_o * static_cast<double>(n));
  return out;
}

double zero_bayes_params(std::size_t n, std::size_t k, double delta) {
  check_delta(delta);
  if (n < 1 || k > n) throw ArgumentError("need k <= n and n >= 1");
  const double nd = static_cast<double>(n);
  const double log_term = std::log(2.0 / delta);
  return static_cast<double>(k) / nd +
         (2.0 * log_term / nd) * (1.0 + std::sqrt(1.0 + static_cast<double>(k) / log_term));
}

double binomial_tail(std::uint64_t n, double q, std::uint64_t l, TailDirection direction) {
  if (!(q >= 0.0 && q <= 1.0)) throw ArgumentError("q must lie in [0,1]");
  if (l > n) throw ArgumentError("need 0 <= ℓ <= n");
  if (direction == TailDirection::LessEqual) {
    return binomial_tail(n, 1.0 - q, n - l, TailDirection::GreaterEqual);
  }
  if (l == 0) return 1.0;
  if (q == 0.0) return 0.0;
  if (q == 1.0) return 1.0;
  // Sum pmf(j) for j in [ℓ, n], starting from the term nearest the mode and
  // walking outward with the ratio recurrence; away from the mode the terms
  // shrink, so the walk stops once they no longer change the sum.
  const double nd = static_cast<double>(n);
  const double mode = std::floor((nd + 1.0) * q);
  const std::uint64_t start =
      std::clamp<std::uint64_t>(static_cast<std::uint64_t>(std::min(mode, nd)), l, n);
  const double log_q = std::log(q);
  const double log_1mq = std::log1p(-q);
  const auto sd = static_cast<double>(start);
  const double log_start = std::lgamma(nd + 1.0) - std::lgamma(sd + 1.0) - std::lgamma(nd - sd + 1.0) +
                           sd * log_q + (nd - sd) * log_1mq;
  const double odds = q / (1.0 - q);
  double sum = 1.0;  // in units of pmf(start)
  double term = 1.0;
  for (std::uint64_t j = start; j < n; ++j) {
    // pmf(j+1)/pmf(j) = (n−j)/(j+1) · q/(1−q)
    term *= static_cast<double>(n - j) / static_cast<double>(j + 1) * odds;
    sum += term;
    if (term < sum * 1e-17) break;
  }
  term = 1.0;
  for (std::uint64_t j = start; j > l; --j) {
    // pmf(j−1)/pmf(j) = j/(n−j+1) · (1−q)/q
    term *= static_cast<double>(j) / static_cast<double>(n - j + 1) / odds;
    sum += term;
    if (term < sum * 1e-17) break;
  }
  return std::min(1.0, std::exp(log_start) * sum);
}

double normal_cdf(double a) { return 0.5 * std::erfc(-a / std::numbers::sqrt2); }

std::string to_string(SludClause clause) {
  switch (clause) {
    case SludClause::A: return "a";
    case SludClause::B: return "b";
    case SludClause::Inapplicable: return "inapplicable";
  }
  return "inapplicable";
}

SludBound slud_bound(std::uint64_t n, double q, std::uint64_t l) {
  if (!(q > 0.0 && q <= 0.5)) throw ArgumentError("q must lie in (0,1/2]");
  if (n < 1) throw ArgumentError("n must be positive");
  const double nd = static_cast<double>(n);
  const double ld = static_cast<double>(l);
  const double mean = nd * q;
  SludBound out;
  if (ld <= mean) {
    out.bound = 1.0 - normal_cdf((ld - mean) / std::sqrt(mean));
    out.clause = SludClause::A;
  }
  if (ld >= mean && ld <= nd * (1.0 - q)) {
    const double b = 1.0 - normal_cdf((ld - mean) / std::sqrt(mean * (1.0 - q)));
    if (out.clause == SludClause::Inapplicable || b > out.bound) {
      out.bound = b;
      out.clause = SludClause::B;
    }
  }
  return out;
}

LowerBoundConstants lower_bound_constants(std::size_t k) {
  if (k < 1) throw ArgumentError("k must be positive");
  LowerBoundConstants c;
  c.c1 = 0.5 - normal_cdf(-1.0 / std::sqrt(3.0));
  c.c2 = 1.0 - normal_cdf(2.0 + 2.0 / std::sqrt(static_cast<double>(k)));
  c.c_o = c.c1 * c.c2;
  return c;
}

double concentration_bound(ConcentrationKind kind, std::size_t k, double x) {
  if (!(x >= 0.0 && x <= 1.0)) throw ArgumentError("x must lie in [0,1]");
  const double kd = static_cast<double>(k);
  if (kind == ConcentrationKind::ChernoffBall) return std::exp(-kd * x * x / 2.0);
  return 2.0 * std::exp(-2.0 * kd * x * x);
}

}  // namespace nnrates
