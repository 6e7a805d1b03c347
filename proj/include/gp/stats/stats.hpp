#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "gp/core/geometry.hpp"

namespace gp::stats {

/// Closed-boundary containment: x in [bx, bx + w] and y in [by, by + h].
bool hit_test(Point p, const Bbox& b);

struct OutcomeSeries {
  std::vector<std::string> sample_ids;
  std::vector<bool> hits;

  std::size_t n() const { return hits.size(); }
  std::size_t hit_count() const;
};

/// Rates and interval endpoints are fractions in [0, 1].
struct RateCI {
  double rate = 0;
  double lo = 0;
  double hi = 0;
};

enum class CIMethod { Bootstrap, ClopperPearson };

inline constexpr int kDefaultResamples = 10000;
inline constexpr std::uint64_t kDefaultSeed = 0;

/// Percentile bootstrap of the mean of `hits` (2.5 and 97.5 percentiles,
/// linear interpolation between order statistics) using Rng(seed).
RateCI bootstrap_rate_ci(const std::vector<bool>& hits, int resamples = kDefaultResamples,
                         std::uint64_t seed = kDefaultSeed);

/// Exact binomial interval from Beta quantiles.
RateCI clopper_pearson(std::size_t k, std::size_t n, double alpha = 0.05);

RateCI hit_rate_ci(const OutcomeSeries& outcomes, CIMethod method,
                   int resamples = kDefaultResamples, std::uint64_t seed = kDefaultSeed);

struct PairedOutcomes {
  std::vector<std::string> sample_ids;
  std::vector<bool> original_hits;
  std::vector<bool> perturbed_hits;
  /// Reconciliation: ids present in only one input series.
  std::vector<std::string> only_in_original;
  std::vector<std::string> only_in_perturbed;

  std::size_t n() const { return sample_ids.size(); }
};

/// Aligns two series by sample id (sorted). Throws NoOverlap when no id is
/// shared, InvalidArgument on duplicate ids within a series.
PairedOutcomes pair_outcomes(const OutcomeSeries& original, const OutcomeSeries& perturbed);

struct PairedCounts {
  std::size_t b = 0;  // hit -> miss
  std::size_t c = 0;  // miss -> hit
  std::size_t concordant_hit = 0;
  std::size_t concordant_miss = 0;

  std::size_t n() const { return b + c + concordant_hit + concordant_miss; }
};

PairedCounts count_pairs(const PairedOutcomes& pairs);

enum class TestUsed { McNemarCC, ExactBinomial };

std::string_view to_string(TestUsed t);

struct McNemarResult {
  double p_value = 1;
  TestUsed test = TestUsed::ExactBinomial;
  double statistic = 0;  // chi-square for the corrected test, else 0
};

/// b + c >= 25: continuity-corrected chi-square with 1 df. Otherwise the
/// two-sided exact binomial test p = min(1, 2 P(X <= min(b, c))), X ~
/// Bin(b + c, 1/2). b = c = 0 gives p = 1.
McNemarResult mcnemar(std::size_t b, std::size_t c);

/// Exact P(X <= k) for X ~ Bin(n, 1/2), n <= 62.
double binomial_half_cdf(std::size_t k, std::size_t n);

struct RobustnessRow {
  std::size_t n = 0;
  std::size_t b = 0;
  std::size_t c = 0;
  double flip_rate = 0;     // (b + c) / n
  double net_delta_pp = 0;  // 100 (b - c) / n, positive = degradation
  double delta_ci_lo = 0;   // pp, bootstrap over pairs
  double delta_ci_hi = 0;
  double p_value = 1;
  TestUsed test_used = TestUsed::ExactBinomial;
};

/// Flip rate, net delta with a paired bootstrap CI, and McNemar's test.
RobustnessRow paired_stats(const PairedOutcomes& pairs, int resamples = kDefaultResamples,
                           std::uint64_t seed = kDefaultSeed);

struct ZTest {
  double z = 0;
  double p_value = 1;
};

/// Pooled two-proportion z-test, two-sided. Throws DegenerateProportion when
/// the pooled proportion is 0 or 1.
ZTest two_proportion_z(std::size_t k1, std::size_t n1, std::size_t k2, std::size_t n2);

struct DistanceMetrics {
  double mse = 0;
  double nmse = 0;
  double d_norm = 0;
  std::size_t count = 0;
};

struct PointAndBox {
  Point point;
  Bbox bbox;
};

/// Means over records of squared centre distance, squared distance over box
/// area, and distance over box diagonal. Throws NoParsedPoints when empty.
DistanceMetrics distance_metrics(const std::vector<PointAndBox>& records);

// Special functions, exposed for testing.

/// Regularized upper incomplete gamma Q(a, x).
double gamma_q(double a, double x);

/// Upper tail of the chi-square distribution.
double chi2_sf(double x, double df);

/// Regularized incomplete beta I_x(a, b).
double beta_inc(double a, double b, double x);

/// x with I_x(a, b) = p, by bisection.
double beta_inc_inv(double a, double b, double p);

/// Two-sided standard normal tail 2 (1 - Phi(|z|)).
double normal_two_sided_p(double z);

}  // namespace gp::stats
