#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>

#include "nnrates/distributions.hpp"

namespace nnrates {

// All logarithms are natural.

struct TheoremOneParams {
  std::size_t n = 0;
  std::size_t k = 0;
  double delta = 0.0;
  double p = 0.0;
  double Delta = 0.0;
  double gamma = 0.0;  // Chernoff slack 1 − k/(np) = √((4/k) ln(2/δ))
};

// p = (k/n)/(1 − √((4/k) ln(2/δ))), Δ = min(1/2, √(ln(2/δ)/k)).
// Throws InfeasibleError when k ≤ 4 ln(2/δ).
TheoremOneParams theorem1_params(std::size_t n, std::size_t k, double delta);

struct ClampedBound {
  double raw = 0.0;
  double clamped = 0.0;  // min(1, raw)
};

// δ + μ(∂_{p,Δ}) + enclosure error, for the Theorem-1 parameters of (n, k, δ).
ClampedBound misclassification_upper_bound(const DistributionInstance& dist, std::size_t n,
                                           std::size_t k, double delta);

struct SmoothnessSpec {
  double alpha = 1.0;
  double L = 1.0;
};

struct MarginSpec {
  double beta = 0.0;
  double C = 1.0;
};

struct Thresholds {
  double upper_band = 0.0;  // Δ + L p^α
  double lower_band = 0.0;  // max(0, 1/√k − L((k+√k+1)/n)^α)
};

Thresholds smooth_thresholds(const SmoothnessSpec& s, double p, double Delta, std::size_t n,
                             std::size_t k);

// Hölder constants (α_H, L_H) in d dimensions with density ≥ μ_min to (α, L).
SmoothnessSpec holder_translate(double alpha_h, int d, double L_h, double mu_min);

enum class RateMode { HighProb, Expected };

std::string to_string(RateMode mode);

struct MarginRate {
  std::size_t k = 0;
  double bound = 0.0;
  RateMode mode = RateMode::Expected;
};

// k = k_o n^{2α/(2α+1)} (ln(1/δ))^{1/(2α+1)}, bound δ + C_o (ln(1/δ)/n)^{αβ/(2α+1)};
// without δ, k = k_o n^{2α/(2α+1)} and bound C_o n^{−α(β+1)/(2α+1)}.
MarginRate margin_rate(std::size_t n, std::optional<double> delta, const SmoothnessSpec& s,
                       const MarginSpec& m, double k_o = 1.0, double C_o = 1.0);

// e^{−k/8} + 6C max(2L(2k/n)^α, √(8(β+2)/k))^{β+1}.
double expected_risk_bound(std::size_t n, std::size_t k, const SmoothnessSpec& s,
                           const MarginSpec& m);

// e^{−k/8} + 4Δx e^{−2k(Δx − Δo)²}; requires Δx > Δo.
double pointwise_risk_bound(std::size_t k, double delta_x, double delta_o);

struct ExponentialRegime {
  std::size_t k = 0;
  double delta = 0.0;
  double C_o = 0.0;
  double bound = 0.0;
};

ExponentialRegime exponential_regime(double delta_star, const SmoothnessSpec& s, std::size_t n);

// p = k/n + (2 ln(2/δ)/n)(1 + √(1 + k/ln(2/δ))).
double zero_bayes_params(std::size_t n, std::size_t k, double delta);

enum class TailDirection { GreaterEqual, LessEqual };

// Pr(Bin(n, q) ≥ ℓ) or Pr(Bin(n, q) ≤ ℓ), summed term by term.
double binomial_tail(std::uint64_t n, double q, std::uint64_t l, TailDirection direction);

double normal_cdf(double a);

enum class SludClause { A, B, Inapplicable };

std::string to_string(SludClause clause);

struct SludBound {
  double bound = 0.0;
  SludClause clause = SludClause::Inapplicable;
};

// Lower bounds on Pr(Bin(n, q) ≥ ℓ) for q ≤ 1/2:
//   (a) ℓ ≤ nq:            1 − Φ((ℓ − nq)/√(nq))
//   (b) nq ≤ ℓ ≤ n(1−q):   1 − Φ((ℓ − nq)/√(nq(1−q)))
SludBound slud_bound(std::uint64_t n, double q, std::uint64_t l);

struct LowerBoundConstants {
  double c1 = 0.0;
  double c2 = 0.0;
  double c_o = 0.0;
};

// c1 = 1/2 − Φ(−1/√3), c2 = 1 − Φ(2 + 2/√k), c_o = c1 c2.
LowerBoundConstants lower_bound_constants(std::size_t k);

enum class ConcentrationKind { ChernoffBall, HoeffdingDev };

// e^{−k x²/2} (chernoff_ball) or 2e^{−2k x²} (hoeffding_dev).
double concentration_bound(ConcentrationKind kind, std::size_t k, double x);

}  // namespace nnrates
