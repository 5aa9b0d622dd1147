#ifndef SIGMA_STATS_HPP_
#define SIGMA_STATS_HPP_

// Statistics for autocorrelated Monte Carlo output: Kolmogorov-Smirnov
// distances, Geyer effective sample sizes, split R-hat, Wilson intervals,
// energy distance, and resampling-based thresholds on thinned chains.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "sigma/rng.hpp"

namespace sigma {

inline double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

/// Scaled complementary error function e^{x^2} erfc(x) for x >= 0.
inline double erfcx(double x) {
  if (x < 12.0) return std::exp(x * x) * std::erfc(x);
  // asymptotic series, relative error < 1e-12 for x >= 12
  double inv2x2 = 1.0 / (2.0 * x * x);
  double sum = 1.0, term = 1.0;
  for (int k = 1; k <= 8; ++k) {
    term *= -(2.0 * k - 1.0) * inv2x2;
    sum += term;
  }
  return sum / (x * std::sqrt(M_PI));
}

// ---------------------------------------------------------------------------
// Kolmogorov-Smirnov distances.

inline double ks_two_sample(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw std::invalid_argument("empty sample");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  double d = 0;
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    // advance past a whole tie group on both sides before comparing
    double v = std::min(a[i], b[j]);
    while (i < a.size() && a[i] == v) ++i;
    while (j < b.size() && b[j] == v) ++j;
    double fa = static_cast<double>(i) / a.size();
    double fb = static_cast<double>(j) / b.size();
    d = std::max(d, std::abs(fa - fb));
  }
  return d;
}

inline double ks_one_sample(std::vector<double> a, const std::function<double(double)>& cdf) {
  if (a.empty()) throw std::invalid_argument("empty sample");
  std::sort(a.begin(), a.end());
  double d = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    double f = cdf(a[i]);
    d = std::max(d, std::abs(f - static_cast<double>(i) / a.size()));
    d = std::max(d, std::abs(static_cast<double>(i + 1) / a.size() - f));
  }
  return d;
}

/// Asymptotic one-sample critical value at effective size n_eff.
inline double ks_critical(double alpha, double n_eff) {
  return std::sqrt(-0.5 * std::log(alpha / 2.0)) / std::sqrt(n_eff);
}

/// Two-sample critical value at effective sizes.
inline double ks_critical_two(double alpha, double n_eff_a, double n_eff_b) {
  return std::sqrt(-0.5 * std::log(alpha / 2.0)) *
         std::sqrt(1.0 / n_eff_a + 1.0 / n_eff_b);
}

// ---------------------------------------------------------------------------
// Autocorrelation, ESS, R-hat.

/// Integrated autocorrelation time by Geyer's initial monotone positive
/// sequence; returns a value >= 1.
inline double autocorr_time(const std::vector<double>& x) {
  const std::size_t n = x.size();
  if (n < 8) return 1.0;
  double mean = std::accumulate(x.begin(), x.end(), 0.0) / n;
  auto autocov = [&](std::size_t lag) {
    double s = 0;
    for (std::size_t t = 0; t + lag < n; ++t) s += (x[t] - mean) * (x[t + lag] - mean);
    return s / n;
  };
  double c0 = autocov(0);
  if (c0 <= 0) return 1.0;
  double tau = 1.0;  // contribution of lag 0 handled via 2*sum(pairs) - 1
  double prev_pair = HUGE_VAL;
  double pair_sum = 0;
  for (std::size_t m = 0; 2 * m + 1 < n / 2; ++m) {
    double g = (autocov(2 * m) + autocov(2 * m + 1)) / c0;
    if (g <= 0) break;
    g = std::min(g, prev_pair);
    prev_pair = g;
    pair_sum += g;
    if (g < 1e-4) break;
  }
  tau = std::max(1.0, 2.0 * pair_sum - 1.0);
  return tau;
}

inline double ess_of_chain(const std::vector<double>& x) {
  return static_cast<double>(x.size()) / autocorr_time(x);
}

inline double ess_total(const std::vector<std::vector<double>>& chains) {
  double e = 0;
  for (const auto& c : chains) e += ess_of_chain(c);
  return e;
}

/// Split potential-scale-reduction statistic; needs at least two half
/// chains with a few samples each.
inline double split_rhat(const std::vector<std::vector<double>>& chains) {
  std::vector<std::vector<double>> halves;
  for (const auto& c : chains) {
    if (c.size() < 8) continue;
    std::size_t half = c.size() / 2;
    halves.emplace_back(c.begin(), c.begin() + half);
    halves.emplace_back(c.begin() + half, c.begin() + 2 * half);
  }
  if (halves.size() < 2) return std::nan("");
  const std::size_t m = halves.size();
  const std::size_t n = halves[0].size();
  std::vector<double> means(m);
  double grand = 0;
  for (std::size_t c = 0; c < m; ++c) {
    means[c] = std::accumulate(halves[c].begin(), halves[c].end(), 0.0) / n;
    grand += means[c];
  }
  grand /= m;
  double between = 0, within = 0;
  for (std::size_t c = 0; c < m; ++c) {
    between += (means[c] - grand) * (means[c] - grand);
    double v = 0;
    for (double xi : halves[c]) v += (xi - means[c]) * (xi - means[c]);
    within += v / (n - 1);
  }
  between *= static_cast<double>(n) / (m - 1);
  within /= m;
  if (within <= 0) return 1.0;
  double var_hat = (static_cast<double>(n - 1) / n) * within + between / n;
  return std::sqrt(var_hat / within);
}

// ---------------------------------------------------------------------------
// Wilson score interval.

inline double wilson_upper(double successes, double n_eff, double z) {
  if (n_eff <= 0) return 1.0;
  double p = successes / n_eff;
  double z2 = z * z;
  double denom = 1.0 + z2 / n_eff;
  double center = p + z2 / (2.0 * n_eff);
  double rad = z * std::sqrt(p * (1.0 - p) / n_eff + z2 / (4.0 * n_eff * n_eff));
  return std::min(1.0, (center + rad) / denom);
}

// ---------------------------------------------------------------------------
// Thinning and resampling thresholds.

/// Autocorrelation time for distribution comparisons. A sign-symmetric series
/// can look white while its magnitude is slaved to a slow component; an
/// empirical CDF is sensitive to that scale process, so take the worse of the
/// series and its centered absolute values.
inline double distribution_tau(const std::vector<double>& x) {
  double tau = autocorr_time(x);
  if (x.size() < 8) return tau;
  double mean = std::accumulate(x.begin(), x.end(), 0.0) / x.size();
  std::vector<double> dev(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) dev[i] = std::abs(x[i] - mean);
  return std::max(tau, autocorr_time(dev));
}

/// Thins each chain by its own integrated autocorrelation time, so that
/// the result is approximately independent.
inline std::vector<std::vector<double>> thin_chains(const std::vector<std::vector<double>>& chains) {
  std::vector<std::vector<double>> out;
  for (const auto& c : chains) {
    auto stride = static_cast<std::size_t>(std::ceil(distribution_tau(c)));
    std::vector<double> t;
    t.reserve(c.size() / stride + 1);
    for (std::size_t i = 0; i < c.size(); i += stride) t.push_back(c[i]);
    out.push_back(std::move(t));
  }
  return out;
}

inline std::vector<double> concat(const std::vector<std::vector<double>>& chains) {
  std::vector<double> out;
  for (const auto& c : chains) out.insert(out.end(), c.begin(), c.end());
  return out;
}

struct TwoSampleResult {
  double statistic = 0;
  double threshold = 0;
  bool pass = false;
  double n_eff_a = 0, n_eff_b = 0;
};

/// Two-sample KS on thinned chains with a circular-block bootstrap null:
/// both pseudo-samples are drawn from the pooled thinned data, preserving
/// short-range dependence left over after thinning.
inline TwoSampleResult two_sample_ks_test(const std::vector<std::vector<double>>& chains_a,
                                          const std::vector<std::vector<double>>& chains_b,
                                          double alpha, int resamples, CounterRng& rng,
                                          std::size_t block_len = 3) {
  auto ta = concat(thin_chains(chains_a));
  auto tb = concat(thin_chains(chains_b));
  TwoSampleResult res;
  res.n_eff_a = static_cast<double>(ta.size());
  res.n_eff_b = static_cast<double>(tb.size());
  res.statistic = ks_two_sample(ta, tb);

  std::vector<double> pooled = ta;
  pooled.insert(pooled.end(), tb.begin(), tb.end());
  const std::size_t np = pooled.size();
  auto draw = [&](std::size_t count) {
    std::vector<double> s;
    s.reserve(count + block_len);
    while (s.size() < count) {
      std::size_t start = static_cast<std::size_t>(rng.uniform() * np);
      for (std::size_t k = 0; k < block_len && s.size() < count; ++k)
        s.push_back(pooled[(start + k) % np]);
    }
    return s;
  };
  std::vector<double> null_stats;
  null_stats.reserve(resamples);
  for (int b = 0; b < resamples; ++b)
    null_stats.push_back(ks_two_sample(draw(ta.size()), draw(tb.size())));
  std::sort(null_stats.begin(), null_stats.end());
  auto idx = static_cast<std::size_t>(std::ceil((1.0 - alpha) * resamples));
  idx = std::min(idx, null_stats.size() - 1);
  res.threshold = null_stats[idx];
  res.pass = res.statistic <= res.threshold;
  return res;
}

/// One-sample KS against a reference cdf with an ESS-adjusted critical
/// value.
inline TwoSampleResult one_sample_ks_test(const std::vector<std::vector<double>>& chains,
                                          const std::function<double(double)>& cdf,
                                          double alpha) {
  TwoSampleResult res;
  res.n_eff_a = ess_total(chains);
  res.statistic = ks_one_sample(concat(chains), cdf);
  res.threshold = ks_critical(alpha, res.n_eff_a);
  res.pass = res.statistic <= res.threshold;
  return res;
}

// ---------------------------------------------------------------------------
// Energy distance for joint laws.

/// Rows are points of dimension dim, stored flat.
inline double energy_statistic(const std::vector<double>& x, const std::vector<double>& y,
                               std::size_t dim) {
  const std::size_t nx = x.size() / dim, ny = y.size() / dim;
  if (nx == 0 || ny == 0) throw std::invalid_argument("empty sample");
  auto dist = [&](const std::vector<double>& a, std::size_t i, const std::vector<double>& b,
                  std::size_t j) {
    double s = 0;
    for (std::size_t k = 0; k < dim; ++k) {
      double d = a[i * dim + k] - b[j * dim + k];
      s += d * d;
    }
    return std::sqrt(s);
  };
  double axy = 0, axx = 0, ayy = 0;
  for (std::size_t i = 0; i < nx; ++i)
    for (std::size_t j = 0; j < ny; ++j) axy += dist(x, i, y, j);
  for (std::size_t i = 0; i < nx; ++i)
    for (std::size_t j = i + 1; j < nx; ++j) axx += dist(x, i, x, j);
  for (std::size_t i = 0; i < ny; ++i)
    for (std::size_t j = i + 1; j < ny; ++j) ayy += dist(y, i, y, j);
  return 2.0 * axy / (nx * ny) - 2.0 * axx / (static_cast<double>(nx) * nx) -
         2.0 * ayy / (static_cast<double>(ny) * ny);
}

/// Permutation test for equality of joint laws on (approximately
/// independent) rows; subsamples to keep the O(m^2) cost bounded.
inline TwoSampleResult energy_distance_test(std::vector<double> x, std::vector<double> y,
                                            std::size_t dim, double alpha, int resamples,
                                            CounterRng& rng, std::size_t max_rows = 1200) {
  auto subsample = [&](std::vector<double>& v) {
    std::size_t rows = v.size() / dim;
    if (rows <= max_rows) return;
    std::vector<double> out;
    out.reserve(max_rows * dim);
    double stride = static_cast<double>(rows) / max_rows;
    for (std::size_t r = 0; r < max_rows; ++r) {
      auto src = static_cast<std::size_t>(r * stride);
      out.insert(out.end(), v.begin() + src * dim, v.begin() + (src + 1) * dim);
    }
    v = std::move(out);
  };
  subsample(x);
  subsample(y);
  const std::size_t nx = x.size() / dim, ny = y.size() / dim;
  TwoSampleResult res;
  res.n_eff_a = static_cast<double>(nx);
  res.n_eff_b = static_cast<double>(ny);
  res.statistic = energy_statistic(x, y, dim);

  std::vector<double> pooled = x;
  pooled.insert(pooled.end(), y.begin(), y.end());
  const std::size_t n = nx + ny;
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  std::vector<double> px(nx * dim), py(ny * dim);
  std::vector<double> null_stats;
  null_stats.reserve(resamples);
  for (int b = 0; b < resamples; ++b) {
    for (std::size_t i = n - 1; i > 0; --i) {
      auto j = static_cast<std::size_t>(rng.uniform() * (i + 1));
      std::swap(perm[i], perm[j]);
    }
    for (std::size_t r = 0; r < nx; ++r)
      std::copy_n(pooled.begin() + perm[r] * dim, dim, px.begin() + r * dim);
    for (std::size_t r = 0; r < ny; ++r)
      std::copy_n(pooled.begin() + perm[nx + r] * dim, dim, py.begin() + r * dim);
    null_stats.push_back(energy_statistic(px, py, dim));
  }
  std::sort(null_stats.begin(), null_stats.end());
  auto idx = static_cast<std::size_t>(std::ceil((1.0 - alpha) * resamples));
  idx = std::min(idx, null_stats.size() - 1);
  res.threshold = null_stats[idx];
  res.pass = res.statistic <= res.threshold;
  return res;
}

}  // namespace sigma

#endif  // SIGMA_STATS_HPP_
