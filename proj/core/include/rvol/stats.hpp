#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>

namespace rvol {

inline constexpr double kTradingDaysPerYear = 252.0;

inline double annualize(double per_step_vol) {
  return per_step_vol * std::sqrt(kTradingDaysPerYear);
}

inline double mean(std::span<const double> x) {
  if (x.empty()) throw std::invalid_argument("mean: empty input");
  double s = 0.0;
  for (double v : x) s += v;
  return s / static_cast<double>(x.size());
}

/// Unbiased sample variance (n-1 denominator); 0 for fewer than 2 points.
inline double sample_variance(std::span<const double> x) {
  if (x.size() < 2) return 0.0;
  const double m = mean(x);
  double s = 0.0;
  for (double v : x) s += (v - m) * (v - m);
  return s / static_cast<double>(x.size() - 1);
}

/// Excess kurtosis, moment form: n * sum((x-m)^4) / sum((x-m)^2)^2 - 3.
inline double excess_kurtosis(std::span<const double> x) {
  if (x.size() < 4) throw std::invalid_argument("excess_kurtosis: too short");
  const double m = mean(x);
  double s2 = 0.0, s4 = 0.0;
  for (double v : x) {
    const double d = (v - m) * (v - m);
    s2 += d;
    s4 += d * d;
  }
  if (s2 <= 0.0) throw std::invalid_argument("excess_kurtosis: zero variance");
  return static_cast<double>(x.size()) * s4 / (s2 * s2) - 3.0;
}

/// Sample autocorrelation at the given lag.
inline double autocorrelation(std::span<const double> x, std::size_t lag) {
  if (x.size() < lag + 2) throw std::invalid_argument("autocorrelation: too short");
  const double m = mean(x);
  double num = 0.0, den = 0.0;
  for (std::size_t t = 0; t < x.size(); ++t) {
    den += (x[t] - m) * (x[t] - m);
    if (t + lag < x.size()) num += (x[t] - m) * (x[t + lag] - m);
  }
  if (den <= 0.0) throw std::invalid_argument("autocorrelation: zero variance");
  return num / den;
}

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  double correlation = 0.0;
};

/// Ordinary least squares of y on x. Throws on length mismatch or
/// zero variance in x.
inline LinearFit linear_fit(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw std::invalid_argument("linear_fit: length mismatch");
  if (x.size() < 2) throw std::invalid_argument("linear_fit: too short");
  const double mx = mean(x), my = mean(y);
  double sxx = 0.0, syy = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx <= 0.0) throw std::invalid_argument("linear_fit: zero variance in x");
  LinearFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  f.correlation = syy > 0.0 ? sxy / std::sqrt(sxx * syy) : 0.0;
  f.r_squared = f.correlation * f.correlation;
  return f;
}

}  // namespace rvol
