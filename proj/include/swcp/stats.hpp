#ifndef SWCP_STATS_HPP_
#define SWCP_STATS_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "swcp/params.hpp"
#include "swcp/rng.hpp"

namespace swcp {

inline constexpr double z95 = 1.959963984540054;

/// Monte Carlo point estimate with a 95% interval.
struct estimate {
  double value = 0;
  double stderr_ = 0;
  double ci_low = 0;
  double ci_high = 0;
  std::uint64_t replicates = 0;
  std::uint64_t censored = 0;
  std::uint64_t seed = 0;
};

/// Binomial proportion with a Wilson score interval.
inline estimate wilson(std::uint64_t successes, std::uint64_t n, double z = z95) {
  estimate e;
  e.replicates = n;
  if (n == 0) {
    e.ci_high = 1.0;
    return e;
  }
  const double nn = static_cast<double>(n);
  const double p = static_cast<double>(successes) / nn;
  const double z2 = z * z;
  const double centre = (p + z2 / (2 * nn)) / (1 + z2 / nn);
  const double half = z * std::sqrt(p * (1 - p) / nn + z2 / (4 * nn * nn)) / (1 + z2 / nn);
  e.value = p;
  e.stderr_ = std::sqrt(p * (1 - p) / nn);
  e.ci_low = std::max(0.0, std::min(p, centre - half));
  e.ci_high = std::min(1.0, std::max(p, centre + half));
  return e;
}

// Welford running mean / variance.
class running_stats {
 public:
  void add(double x) {
    ++n_;
    const double delta = x - mean_;
    mean_ += delta / static_cast<double>(n_);
    m2_ += delta * (x - mean_);
  }
  std::uint64_t count() const { return n_; }
  double mean() const { return mean_; }
  double variance() const { return n_ > 1 ? m2_ / static_cast<double>(n_ - 1) : 0.0; }
  double stderr_mean() const {
    return n_ > 0 ? std::sqrt(variance() / static_cast<double>(n_)) : 0.0;
  }
  estimate as_estimate() const {
    estimate e;
    e.value = mean_;
    e.stderr_ = stderr_mean();
    e.ci_low = mean_ - z95 * e.stderr_;
    e.ci_high = mean_ + z95 * e.stderr_;
    e.replicates = n_;
    return e;
  }

 private:
  std::uint64_t n_ = 0;
  double mean_ = 0;
  double m2_ = 0;
};

/// Empirical CDF of integer times on [0, T]. Censored samples (value > T)
/// contribute mass only above T.
inline std::vector<double> ecdf(const std::vector<std::uint64_t>& samples, std::uint64_t T) {
  std::vector<double> cdf(T + 1, 0.0);
  if (samples.empty()) return cdf;
  std::vector<std::uint64_t> counts(T + 1, 0);
  for (auto s : samples)
    if (s <= T) ++counts[s];
  double acc = 0;
  const double n = static_cast<double>(samples.size());
  for (std::uint64_t t = 0; t <= T; ++t) {
    acc += static_cast<double>(counts[t]);
    cdf[t] = acc / n;
  }
  return cdf;
}

inline double sup_distance(const std::vector<double>& a, const std::vector<double>& b) {
  double d = 0;
  for (std::size_t i = 0; i < std::min(a.size(), b.size()); ++i)
    d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}

struct linear_fit {
  double slope = 0;
  double intercept = 0;
  double slope_stderr = 0;
  double r_squared = 0;
  double t_statistic() const {
    return slope_stderr > 0 ? slope / slope_stderr : std::numeric_limits<double>::infinity();
  }
};

/// Weighted least squares y = intercept + slope x. With weights 1/var(y_i) the
/// slope standard error is the propagated measurement error; with unit
/// weights it is the classical residual-based error.
inline linear_fit least_squares(const std::vector<double>& x, const std::vector<double>& y,
                                const std::vector<double>& w = {}) {
  const std::size_t n = x.size();
  if (n < 2 || y.size() != n) throw invalid_parameter("least_squares needs >= 2 points");
  const bool weighted = !w.empty();
  double sw = 0, sx = 0, sy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double wi = weighted ? w[i] : 1.0;
    sw += wi;
    sx += wi * x[i];
    sy += wi * y[i];
  }
  const double mx = sx / sw, my = sy / sw;
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double wi = weighted ? w[i] : 1.0;
    sxx += wi * (x[i] - mx) * (x[i] - mx);
    sxy += wi * (x[i] - mx) * (y[i] - my);
    syy += wi * (y[i] - my) * (y[i] - my);
  }
  if (!(sxx > 0)) throw invalid_parameter("least_squares: degenerate x values");
  linear_fit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  double rss = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double wi = weighted ? w[i] : 1.0;
    const double r = y[i] - f.intercept - f.slope * x[i];
    rss += wi * r * r;
  }
  f.r_squared = syy > 0 ? 1.0 - rss / syy : 1.0;
  if (weighted) {
    f.slope_stderr = std::sqrt(1.0 / sxx);
  } else {
    f.slope_stderr = n > 2 ? std::sqrt(rss / static_cast<double>(n - 2) / sxx) : 0.0;
  }
  return f;
}

/// Quantile with linear interpolation between order statistics (type 7).
inline double quantile(std::vector<double> v, double q) {
  if (v.empty()) throw invalid_parameter("quantile of empty sample");
  std::sort(v.begin(), v.end());
  const double h = (static_cast<double>(v.size()) - 1.0) * q;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const auto hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (h - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

/// Bootstrap standard error of the log-median, deterministic in `seed`.
inline double bootstrap_log_median_se(const std::vector<double>& v, std::uint64_t seed,
                                      int resamples = 500) {
  if (v.empty()) return 0.0;
  counter_stream rng(hash_combine(seed, hash_string("bootstrap")));
  running_stats acc;
  std::vector<double> draw(v.size());
  for (int b = 0; b < resamples; ++b) {
    for (auto& x : draw) x = v[rng.below(v.size())];
    acc.add(std::log(quantile(draw, 0.5)));
  }
  return std::sqrt(acc.variance());
}

}  // namespace swcp

#endif  // SWCP_STATS_HPP_
