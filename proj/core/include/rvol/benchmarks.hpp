#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace rvol {

/// One step of the plain EMA variance benchmark on raw returns.
/// Throws std::invalid_argument on negative prev_var or lambda out of (0, 1].
double std_ema_vol_update(double prev_var, double ret, double lambda_sigma);

struct GarchParams {
  double omega = 0.0;
  double alpha = 0.0;
  double beta = 0.0;

  /// omega > 0, alpha >= 0, beta >= 0. Stationarity (alpha + beta < 1) is
  /// deliberately not required here: published fits cross 1 slightly and are
  /// accepted as direct inputs. garch_fit enforces it.
  void validate() const;
  bool stationary() const { return alpha + beta < 1.0; }
};

/// One GARCH(1,1) step: omega + alpha * ret^2 + beta * prev_var.
double garch_update(double prev_var, double ret, const GarchParams& params);

struct GarchFit {
  GarchParams params;
  double log_likelihood = 0.0;
  bool converged = false;
  int iterations = 0;
};

/// Gaussian quasi-likelihood fit via Nelder-Mead simplex in
/// (log omega, alpha, beta), fixed start (omega = 0.1 * var, alpha = 0.1,
/// beta = 0.8), stationarity enforced by penalty. Initial variance is the
/// sample variance of the input. Requires >= 250 returns with non-zero
/// variance (std::invalid_argument otherwise). Non-convergence returns the
/// best point found with converged = false.
GarchFit garch_fit(std::span<const double> returns, int max_iterations = 2000);

/// Conditional variance path under fixed params: h[0] = initial_var,
/// h[t] = omega + alpha * r[t-1]^2 + beta * h[t-1].
std::vector<double> garch_variance_trace(std::span<const double> returns,
                                         const GarchParams& params,
                                         double initial_var);

struct RegressionReport {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  double correlation = 0.0;
  std::size_t n = 0;  // number of increment pairs
};

/// OLS of one-step increments of y on one-step increments of x (levels in,
/// differences regressed). Throws std::invalid_argument on length mismatch,
/// fewer than 3 points, or zero-variance increments.
RegressionReport increment_regression(std::span<const double> x,
                                      std::span<const double> y);

}  // namespace rvol
