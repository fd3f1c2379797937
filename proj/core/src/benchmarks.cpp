#include "rvol/benchmarks.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "rvol/stats.hpp"

namespace rvol {

double std_ema_vol_update(double prev_var, double ret, double lambda_sigma) {
  if (!(prev_var >= 0.0))
    throw std::invalid_argument("std_ema_vol_update: negative variance");
  if (!(lambda_sigma > 0.0) || lambda_sigma > 1.0)
    throw std::invalid_argument("std_ema_vol_update: lambda outside (0, 1]");
  return (1.0 - lambda_sigma) * prev_var + lambda_sigma * ret * ret;
}

void GarchParams::validate() const {
  if (!(omega > 0.0)) throw std::invalid_argument("garch: omega must be > 0");
  if (alpha < 0.0 || beta < 0.0)
    throw std::invalid_argument("garch: alpha and beta must be >= 0");
}

double garch_update(double prev_var, double ret, const GarchParams& params) {
  params.validate();
  if (!(prev_var >= 0.0))
    throw std::invalid_argument("garch_update: negative variance");
  return params.omega + params.alpha * ret * ret + params.beta * prev_var;
}

std::vector<double> garch_variance_trace(std::span<const double> returns,
                                         const GarchParams& params,
                                         double initial_var) {
  params.validate();
  if (!(initial_var >= 0.0))
    throw std::invalid_argument("garch_variance_trace: negative initial variance");
  std::vector<double> h(returns.size());
  if (returns.empty()) return h;
  h[0] = initial_var;
  for (std::size_t t = 1; t < returns.size(); ++t)
    h[t] = params.omega + params.alpha * returns[t - 1] * returns[t - 1] +
           params.beta * h[t - 1];
  return h;
}

namespace {

constexpr double kStationarityCap = 1.0 - 1e-7;

// Negative Gaussian quasi-log-likelihood in (log omega, alpha, beta);
// infeasible points get a penalty that slopes back toward the feasible set.
double garch_nll(const std::array<double, 3>& x,
                 std::span<const double> returns, double initial_var) {
  const double alpha = x[1], beta = x[2];
  double violation = 0.0;
  if (alpha < 0.0) violation += -alpha;
  if (beta < 0.0) violation += -beta;
  if (alpha + beta > kStationarityCap) violation += alpha + beta - kStationarityCap;
  if (violation > 0.0) return 1e10 * (1.0 + violation);

  const double omega = std::exp(x[0]);
  double h = initial_var;
  double nll = 0.0;
  for (std::size_t t = 0; t < returns.size(); ++t) {
    if (t > 0) h = omega + alpha * returns[t - 1] * returns[t - 1] + beta * h;
    nll += 0.5 * (std::log(h) + returns[t] * returns[t] / h);
  }
  return nll;
}

}  // namespace

GarchFit garch_fit(std::span<const double> returns, int max_iterations) {
  if (returns.size() < 250)
    throw std::invalid_argument("garch_fit: need at least 250 returns");
  const double var = sample_variance(returns);
  if (!(var > 0.0))
    throw std::invalid_argument("garch_fit: degenerate zero-variance returns");

  using Point = std::array<double, 3>;
  auto f = [&](const Point& x) { return garch_nll(x, returns, var); };

  // Nelder-Mead simplex, classic coefficients.
  const Point start = {std::log(0.1 * var), 0.1, 0.8};
  const Point steps = {0.5, 0.05, 0.05};
  std::array<Point, 4> simplex;
  std::array<double, 4> fv;
  simplex.fill(start);
  for (int i = 1; i < 4; ++i) simplex[i][i - 1] += steps[i - 1];
  for (int i = 0; i < 4; ++i) fv[i] = f(simplex[i]);

  int iter = 0;
  bool converged = false;
  for (; iter < max_iterations; ++iter) {
    std::array<int, 4> order = {0, 1, 2, 3};
    std::sort(order.begin(), order.end(),
              [&](int a, int b) { return fv[a] < fv[b]; });
    const int best = order[0], worst = order[3], second = order[2];

    if (std::abs(fv[worst] - fv[best]) <=
        1e-10 * (1.0 + std::abs(fv[best]))) {
      converged = true;
      break;
    }

    Point centroid = {0.0, 0.0, 0.0};
    for (int i = 0; i < 4; ++i) {
      if (i == worst) continue;
      for (int k = 0; k < 3; ++k) centroid[k] += simplex[i][k] / 3.0;
    }
    auto blend = [&](double coef) {
      Point p;
      for (int k = 0; k < 3; ++k)
        p[k] = centroid[k] + coef * (simplex[worst][k] - centroid[k]);
      return p;
    };

    const Point refl = blend(-1.0);
    const double f_refl = f(refl);
    if (f_refl < fv[best]) {
      const Point exp_ = blend(-2.0);
      const double f_exp = f(exp_);
      if (f_exp < f_refl) {
        simplex[worst] = exp_;
        fv[worst] = f_exp;
      } else {
        simplex[worst] = refl;
        fv[worst] = f_refl;
      }
    } else if (f_refl < fv[second]) {
      simplex[worst] = refl;
      fv[worst] = f_refl;
    } else {
      const Point contr = blend(f_refl < fv[worst] ? -0.5 : 0.5);
      const double f_contr = f(contr);
      if (f_contr < std::min(f_refl, fv[worst])) {
        simplex[worst] = contr;
        fv[worst] = f_contr;
      } else {
        for (int i = 0; i < 4; ++i) {  // shrink toward the best vertex
          if (i == best) continue;
          for (int k = 0; k < 3; ++k)
            simplex[i][k] = simplex[best][k] + 0.5 * (simplex[i][k] - simplex[best][k]);
          fv[i] = f(simplex[i]);
        }
      }
    }
  }

  int best = 0;
  for (int i = 1; i < 4; ++i)
    if (fv[i] < fv[best]) best = i;

  GarchFit out;
  out.params.omega = std::exp(simplex[best][0]);
  out.params.alpha = std::max(0.0, simplex[best][1]);
  out.params.beta = std::max(0.0, simplex[best][2]);
  out.log_likelihood = -fv[best] - 0.5 * static_cast<double>(returns.size()) *
                                       std::log(2.0 * std::numbers::pi);
  out.converged = converged;
  out.iterations = iter;
  return out;
}

RegressionReport increment_regression(std::span<const double> x,
                                      std::span<const double> y) {
  if (x.size() != y.size())
    throw std::invalid_argument("increment_regression: length mismatch");
  if (x.size() < 3)
    throw std::invalid_argument("increment_regression: need at least 3 points");
  std::vector<double> dx(x.size() - 1), dy(y.size() - 1);
  for (std::size_t i = 0; i + 1 < x.size(); ++i) {
    dx[i] = x[i + 1] - x[i];
    dy[i] = y[i + 1] - y[i];
  }
  if (!(sample_variance(dx) > 0.0) || !(sample_variance(dy) > 0.0))
    throw std::invalid_argument("increment_regression: zero-variance increments");
  const LinearFit fit = linear_fit(dx, dy);
  RegressionReport rep;
  rep.slope = fit.slope;
  rep.intercept = fit.intercept;
  rep.r_squared = fit.r_squared;
  rep.correlation = fit.correlation;
  rep.n = dx.size();
  return rep;
}

}  // namespace rvol
