#include "gp/stats/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "gp/core/error.hpp"
#include "gp/core/random.hpp"

namespace gp::stats {

bool hit_test(Point p, const Bbox& b) {
  return p.x >= b.x && p.x <= b.x + b.w && p.y >= b.y && p.y <= b.y + b.h;
}

std::size_t OutcomeSeries::hit_count() const {
  return static_cast<std::size_t>(std::count(hits.begin(), hits.end(), true));
}

namespace {

// numpy-style "linear" percentile of sorted values.
double percentile(const std::vector<double>& sorted, double q) {
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + (sorted[hi] - sorted[lo]) * frac;
}

}  // namespace

RateCI bootstrap_rate_ci(const std::vector<bool>& hits, int resamples, std::uint64_t seed) {
  if (hits.empty()) throw Error(ErrorCode::InvalidArgument, "bootstrap of an empty series");
  if (resamples < 1) throw Error(ErrorCode::InvalidArgument, "resamples must be positive");
  const std::size_t n = hits.size();
  Rng rng(seed);
  std::vector<double> means(static_cast<std::size_t>(resamples));
  for (auto& m : means) {
    std::size_t k = 0;
    for (std::size_t i = 0; i < n; ++i) k += hits[rng.below(n)] ? 1 : 0;
    m = static_cast<double>(k) / static_cast<double>(n);
  }
  std::sort(means.begin(), means.end());
  const double rate =
      static_cast<double>(std::count(hits.begin(), hits.end(), true)) / static_cast<double>(n);
  return {rate, percentile(means, 0.025), percentile(means, 0.975)};
}

RateCI clopper_pearson(std::size_t k, std::size_t n, double alpha) {
  if (n == 0 || k > n) throw Error(ErrorCode::InvalidArgument, "clopper_pearson needs 0 <= k <= n, n > 0");
  const double kd = static_cast<double>(k);
  const double nd = static_cast<double>(n);
  RateCI ci;
  ci.rate = kd / nd;
  ci.lo = k == 0 ? 0.0 : beta_inc_inv(kd, nd - kd + 1, alpha / 2);
  ci.hi = k == n ? 1.0 : beta_inc_inv(kd + 1, nd - kd, 1 - alpha / 2);
  return ci;
}

RateCI hit_rate_ci(const OutcomeSeries& outcomes, CIMethod method, int resamples,
                   std::uint64_t seed) {
  if (outcomes.n() == 0) throw Error(ErrorCode::InvalidArgument, "empty outcome series");
  if (method == CIMethod::Bootstrap) return bootstrap_rate_ci(outcomes.hits, resamples, seed);
  return clopper_pearson(outcomes.hit_count(), outcomes.n());
}

PairedOutcomes pair_outcomes(const OutcomeSeries& original, const OutcomeSeries& perturbed) {
  const auto index = [](const OutcomeSeries& s, const char* which) {
    std::map<std::string, bool> m;
    for (std::size_t i = 0; i < s.n(); ++i) {
      if (!m.emplace(s.sample_ids.at(i), s.hits[i]).second) {
        throw Error(ErrorCode::InvalidArgument,
                    std::string("duplicate sample id in ") + which + " series: " + s.sample_ids[i]);
      }
    }
    return m;
  };
  const auto a = index(original, "original");
  const auto b = index(perturbed, "perturbed");
  PairedOutcomes out;
  for (const auto& [id, hit] : a) {
    const auto it = b.find(id);
    if (it == b.end()) {
      out.only_in_original.push_back(id);
      continue;
    }
    out.sample_ids.push_back(id);
    out.original_hits.push_back(hit);
    out.perturbed_hits.push_back(it->second);
  }
  for (const auto& [id, _] : b) {
    if (!a.count(id)) out.only_in_perturbed.push_back(id);
  }
  if (out.sample_ids.empty()) throw Error(ErrorCode::NoOverlap, "series share no sample ids");
  return out;
}

PairedCounts count_pairs(const PairedOutcomes& pairs) {
  PairedCounts c;
  for (std::size_t i = 0; i < pairs.n(); ++i) {
    const bool o = pairs.original_hits[i];
    const bool p = pairs.perturbed_hits[i];
    if (o && p) ++c.concordant_hit;
    else if (o) ++c.b;
    else if (p) ++c.c;
    else ++c.concordant_miss;
  }
  return c;
}

std::string_view to_string(TestUsed t) {
  return t == TestUsed::McNemarCC ? "mcnemar_cc" : "exact_binomial";
}

double binomial_half_cdf(std::size_t k, std::size_t n) {
  if (n > 62) throw Error(ErrorCode::InvalidArgument, "binomial_half_cdf supports n <= 62");
  if (k >= n) return 1.0;
  // Sum of binomial coefficients is exact in 64 bits for n <= 62.
  std::uint64_t sum = 0;
  std::uint64_t coef = 1;
  for (std::size_t i = 0; i <= k; ++i) {
    sum += coef;
    coef = coef * (n - i) / (i + 1);
  }
  return std::ldexp(static_cast<double>(sum), -static_cast<int>(n));
}

McNemarResult mcnemar(std::size_t b, std::size_t c) {
  McNemarResult r;
  const std::size_t n = b + c;
  if (n == 0) return r;
  if (n >= 25) {
    const double diff = std::abs(static_cast<double>(b) - static_cast<double>(c)) - 1.0;
    const double d = std::max(diff, 0.0);
    r.statistic = d * d / static_cast<double>(n);
    r.p_value = chi2_sf(r.statistic, 1);
    r.test = TestUsed::McNemarCC;
    return r;
  }
  r.test = TestUsed::ExactBinomial;
  r.p_value = std::min(1.0, 2.0 * binomial_half_cdf(std::min(b, c), n));
  return r;
}

RobustnessRow paired_stats(const PairedOutcomes& pairs, int resamples, std::uint64_t seed) {
  const std::size_t n = pairs.n();
  if (n == 0) throw Error(ErrorCode::InvalidArgument, "no pairs");
  const PairedCounts counts = count_pairs(pairs);
  RobustnessRow row;
  row.n = n;
  row.b = counts.b;
  row.c = counts.c;
  row.flip_rate = static_cast<double>(counts.b + counts.c) / static_cast<double>(n);
  row.net_delta_pp =
      100.0 * (static_cast<double>(counts.b) - static_cast<double>(counts.c)) / static_cast<double>(n);

  // Resampling unit is the pair: each draw keeps an original/perturbed
  // outcome together.
  std::vector<int> per_pair(n);
  for (std::size_t i = 0; i < n; ++i) {
    per_pair[i] = static_cast<int>(pairs.original_hits[i]) - static_cast<int>(pairs.perturbed_hits[i]);
  }
  Rng rng(seed);
  std::vector<double> deltas(static_cast<std::size_t>(std::max(resamples, 1)));
  for (auto& d : deltas) {
    long sum = 0;
    for (std::size_t i = 0; i < n; ++i) sum += per_pair[rng.below(n)];
    d = 100.0 * static_cast<double>(sum) / static_cast<double>(n);
  }
  std::sort(deltas.begin(), deltas.end());
  row.delta_ci_lo = percentile(deltas, 0.025);
  row.delta_ci_hi = percentile(deltas, 0.975);

  const McNemarResult test = mcnemar(counts.b, counts.c);
  row.p_value = test.p_value;
  row.test_used = test.test;
  return row;
}

ZTest two_proportion_z(std::size_t k1, std::size_t n1, std::size_t k2, std::size_t n2) {
  if (n1 == 0 || n2 == 0 || k1 > n1 || k2 > n2) {
    throw Error(ErrorCode::InvalidArgument, "two_proportion_z needs 0 <= k <= n, n > 0");
  }
  const double p1 = static_cast<double>(k1) / static_cast<double>(n1);
  const double p2 = static_cast<double>(k2) / static_cast<double>(n2);
  const double pooled = static_cast<double>(k1 + k2) / static_cast<double>(n1 + n2);
  if (pooled <= 0 || pooled >= 1) {
    throw Error(ErrorCode::DegenerateProportion, "pooled proportion is 0 or 1");
  }
  const double se = std::sqrt(pooled * (1 - pooled) * (1.0 / static_cast<double>(n1) + 1.0 / static_cast<double>(n2)));
  ZTest t;
  t.z = (p1 - p2) / se;
  t.p_value = normal_two_sided_p(t.z);
  return t;
}

DistanceMetrics distance_metrics(const std::vector<PointAndBox>& records) {
  if (records.empty()) throw Error(ErrorCode::NoParsedPoints, "no records with a parsed point");
  DistanceMetrics m;
  for (const auto& r : records) {
    if (!(r.bbox.w > 0 && r.bbox.h > 0)) {
      throw Error(ErrorCode::InvalidArgument, "bounding boxes must have positive size");
    }
    const Point c = r.bbox.center();
    const double dx = r.point.x - c.x;
    const double dy = r.point.y - c.y;
    const double sq = dx * dx + dy * dy;
    m.mse += sq;
    m.nmse += sq / (r.bbox.w * r.bbox.h);
    m.d_norm += std::sqrt(sq) / std::hypot(r.bbox.w, r.bbox.h);
  }
  const double n = static_cast<double>(records.size());
  m.mse /= n;
  m.nmse /= n;
  m.d_norm /= n;
  m.count = records.size();
  return m;
}

namespace {

constexpr double kEps = 1e-16;
constexpr double kTiny = 1e-300;

// Series for P(a, x); converges quickly for x < a + 1.
double gamma_p_series(double a, double x) {
  double ap = a;
  double sum = 1.0 / a;
  double del = sum;
  for (int n = 0; n < 10000; ++n) {
    ap += 1;
    del *= x / ap;
    sum += del;
    if (std::abs(del) < std::abs(sum) * kEps) break;
  }
  return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Continued fraction for Q(a, x) (modified Lentz); for x >= a + 1.
double gamma_q_fraction(double a, double x) {
  double b = x + 1 - a;
  double c = 1 / kTiny;
  double d = 1 / b;
  double h = d;
  for (int i = 1; i < 10000; ++i) {
    const double an = -i * (i - a);
    b += 2;
    d = an * d + b;
    if (std::abs(d) < kTiny) d = kTiny;
    c = b + an / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1) < kEps) break;
  }
  return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

// Continued fraction for the incomplete beta function.
double beta_fraction(double a, double b, double x) {
  const double qab = a + b;
  const double qap = a + 1;
  const double qam = a - 1;
  double c = 1;
  double d = 1 - qab * x / qap;
  if (std::abs(d) < kTiny) d = kTiny;
  d = 1 / d;
  double h = d;
  for (int m = 1; m < 10000; ++m) {
    const int m2 = 2 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1) < kEps) break;
  }
  return h;
}

}  // namespace

double gamma_q(double a, double x) {
  if (a <= 0 || x < 0) throw Error(ErrorCode::InvalidArgument, "gamma_q needs a > 0, x >= 0");
  if (x == 0) return 1.0;
  if (x < a + 1) return 1.0 - gamma_p_series(a, x);
  return gamma_q_fraction(a, x);
}

double chi2_sf(double x, double df) {
  if (x <= 0) return 1.0;
  return gamma_q(df / 2, x / 2);
}

double beta_inc(double a, double b, double x) {
  if (x <= 0) return 0.0;
  if (x >= 1) return 1.0;
  const double front = std::exp(std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                                a * std::log(x) + b * std::log1p(-x));
  if (x < (a + 1) / (a + b + 2)) return front * beta_fraction(a, b, x) / a;
  return 1.0 - front * beta_fraction(b, a, 1 - x) / b;
}

double beta_inc_inv(double a, double b, double p) {
  double lo = 0;
  double hi = 1;
  for (int i = 0; i < 200 && hi - lo > 1e-15; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (beta_inc(a, b, mid) < p) lo = mid;
    else hi = mid;
  }
  return 0.5 * (lo + hi);
}

double normal_two_sided_p(double z) { return std::erfc(std::abs(z) / std::sqrt(2.0)); }

}  // namespace gp::stats
