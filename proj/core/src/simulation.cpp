#include "rvol/simulation.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "rvol/stats.hpp"

namespace rvol {

std::uint64_t Rng::splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

Rng::Rng(std::uint64_t seed) : engine_(splitmix64(seed)) {}

Rng Rng::for_stream(std::uint64_t base_seed, std::uint64_t stream) {
  return Rng(base_seed ^ ((stream + 1) * 0x9E3779B97F4A7C15ULL));
}

double Rng::uniform() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double Rng::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  const double u1 = static_cast<double>((engine_() >> 11) + 1) * 0x1.0p-53;
  const double u2 = static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  spare_ = radius * std::sin(angle);
  has_spare_ = true;
  return radius * std::cos(angle);
}

std::uint64_t Rng::uniform_below(std::uint64_t n) {
  if (n == 0) throw std::invalid_argument("uniform_below: n must be > 0");
  auto v = static_cast<std::uint64_t>(uniform() * static_cast<double>(n));
  return v < n ? v : n - 1;
}

void SimConfig::validate() const {
  estimator.validate();
  if (burn_in < 0 || n_steps <= burn_in)
    throw std::invalid_argument("sim config: need n_steps > burn_in >= 0");
  if (!(sigma_tilde_const > 0.0))
    throw std::invalid_argument("sim config: sigma_tilde_const must be > 0");
  if (!(initial_price > 0.0))
    throw std::invalid_argument("sim config: initial_price must be > 0");
}

SimResult simulate_index_path(const SimConfig& config) {
  config.validate();
  Rng rng = Rng::for_stream(config.seed, 0);

  ReactiveState st = init_state(config.initial_price, config.estimator, 0);
  const Date start = Date::parse("2000-01-03");

  SimResult out;
  out.series.instrument_id = "sim";
  const long kept = config.n_steps - config.burn_in + 1;
  out.series.dates.reserve(kept);
  out.series.prices.reserve(kept);
  out.sigma.reserve(kept);
  out.level.reserve(kept);

  double price = config.initial_price;
  double sigma = config.sigma_tilde_const;  // level / spot is 1 at start
  Date date = start;

  auto record = [&]() {
    out.series.dates.push_back(date);
    out.series.prices.push_back(price);
    out.sigma.push_back(sigma);
    out.level.push_back(st.level);
  };
  if (config.burn_in == 0) record();

  for (long t = 1; t <= config.n_steps; ++t) {
    double next = 0.0;
    for (;;) {
      next = price * (1.0 + sigma * rng.normal());
      if (next > 0.0) break;
      ++out.resamples;
    }
    update_index(st, next, config.estimator);
    price = next;
    date = date.next_day();
    sigma = config.sigma_tilde_const * st.level / price;
    if (t >= config.burn_in) record();
  }
  return out;
}

PriceSeries simulate_index(const SimConfig& config) {
  return simulate_index_path(config).series;
}

CorrFunction leverage_correlation(const PriceSeries& series, int tau_max) {
  if (tau_max < 1)
    throw std::invalid_argument("leverage_correlation: tau_max must be >= 1");
  if (series.size() < static_cast<std::size_t>(tau_max) + 3)
    throw std::invalid_argument("leverage_correlation: series too short");
  const ReturnSeries rs = arithmetic_returns(series);
  const auto& dx = rs.returns;
  const std::size_t n = dx.size();

  double m2 = 0.0;
  for (double v : dx) m2 += v * v;
  m2 /= static_cast<double>(n);
  if (!(m2 > 0.0))
    throw std::invalid_argument("leverage_correlation: flat series");
  const double denom = m2 * m2;

  CorrFunction out;
  out.taus.reserve(tau_max);
  out.values.reserve(tau_max);
  out.n_samples.reserve(tau_max);
  for (int tau = 1; tau <= tau_max; ++tau) {
    double acc = 0.0;
    const std::size_t count = n - static_cast<std::size_t>(tau);
    for (std::size_t t = 0; t < count; ++t)
      acc += dx[t + tau] * dx[t + tau] * dx[t];
    out.taus.push_back(tau);
    out.values.push_back(acc / static_cast<double>(count) / denom);
    out.n_samples.push_back(static_cast<long>(count));
  }
  return out;
}

ExpFit fit_exponential(const CorrFunction& corr, int min_lag, int max_lag,
                       long min_samples) {
  if (min_lag < 1 || max_lag < min_lag)
    throw std::invalid_argument("fit_exponential: bad lag range");
  std::vector<double> taus, logs;
  for (std::size_t i = 0; i < corr.taus.size(); ++i) {
    const int tau = corr.taus[i];
    if (tau < min_lag || tau > max_lag) continue;
    if (corr.n_samples[i] < min_samples) continue;
    if (!(corr.values[i] < 0.0)) continue;  // log needs -value > 0
    taus.push_back(static_cast<double>(tau));
    logs.push_back(std::log(-corr.values[i]));
  }
  if (taus.size() < 5)
    throw std::invalid_argument("fit_exponential: fewer than 5 usable lags");

  const LinearFit fit = linear_fit(taus, logs);
  if (!(fit.slope < 0.0))
    throw std::invalid_argument("fit_exponential: no decay (slope >= 0)");

  ExpFit out;
  out.amplitude = std::exp(fit.intercept);
  out.time_constant = -1.0 / fit.slope;
  out.n_lags_used = static_cast<int>(taus.size());

  double ss = 0.0;
  for (std::size_t i = 0; i < corr.taus.size(); ++i) {
    const int tau = corr.taus[i];
    if (tau < min_lag || tau > max_lag) continue;
    if (corr.n_samples[i] < min_samples) continue;
    if (!(corr.values[i] < 0.0)) continue;
    const double model = -out.amplitude * std::exp(-tau / out.time_constant);
    ss += (corr.values[i] - model) * (corr.values[i] - model);
  }
  out.residual_norm = std::sqrt(ss);
  return out;
}

}  // namespace rvol
