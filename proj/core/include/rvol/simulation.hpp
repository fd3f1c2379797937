#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "rvol/reactive.hpp"
#include "rvol/timeseries.hpp"

namespace rvol {

/// Deterministic random source: mt19937_64 seeded through SplitMix64, plus a
/// fixed Box-Muller transform for normals. Both the engine sequence and the
/// transform are pinned here, so a given (seed, stream) pair yields the same
/// draws on every platform.
///
/// Stream splitting: independent sub-streams derive their seed as
/// splitmix64(base_seed ^ (stream + 1) * 0x9E3779B97F4A7C15). Stream 0 is
/// the main path; per-instrument work uses its instrument ordinal.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);
  static std::uint64_t splitmix64(std::uint64_t x);
  static Rng for_stream(std::uint64_t base_seed, std::uint64_t stream);

  std::uint64_t next_u64() { return engine_(); }
  /// Uniform in [0, 1), 53-bit resolution.
  double uniform();
  /// Standard normal via Box-Muller on (u1 in (0,1], u2 in [0,1)); the
  /// second deviate of each pair is cached.
  double normal();
  /// Uniform integer in [0, n).
  std::uint64_t uniform_below(std::uint64_t n);

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

struct SimConfig {
  long n_steps = 10000;            // total updates generated
  double sigma_tilde_const = 0.01; // renormalized vol held fixed
  EstimatorParams estimator;
  std::uint64_t seed = 1;
  long burn_in = 100;              // leading updates dropped from the output
  double initial_price = 100.0;

  void validate() const;  // n_steps > burn_in >= 0, positive vol and price
};

/// Simulated path plus the per-date vol and level traces used to build it.
/// sigma[i] and level[i] match series.dates[i]; sigma[0] equals
/// sigma_tilde_const (levels start at the spot).
struct SimResult {
  PriceSeries series;
  std::vector<double> sigma;
  std::vector<double> level;
  long resamples = 0;  // innovations redrawn to keep the price positive
};

/// Feedback loop: each step draws a standard normal, moves the price by
/// sigma * eps with sigma = sigma_tilde_const * level / spot, then updates
/// the levels with the new price. Dates are synthetic sequential days.
SimResult simulate_index_path(const SimConfig& config);

/// Just the price series of simulate_index_path.
PriceSeries simulate_index(const SimConfig& config);

/// Leverage correlation: values[tau-1] = E[dx(t+tau)^2 dx(t)] / E[dx^2]^2
/// with dx the arithmetic returns; n_samples counts the averaged terms.
struct CorrFunction {
  std::vector<int> taus;
  std::vector<double> values;
  std::vector<long> n_samples;
};

/// Requires series.size() > tau_max + 2 and tau_max >= 1.
CorrFunction leverage_correlation(const PriceSeries& series, int tau_max);

struct ExpFit {
  double amplitude = 0.0;      // A in -A * exp(-tau / time_constant)
  double time_constant = 0.0;  // in steps
  double residual_norm = 0.0;  // L2 over fitted lags, original space
  int n_lags_used = 0;
};

/// Linear regression of log(-value) on tau over lags in [min_lag, max_lag]
/// with value < 0 and n_samples >= min_samples. Throws std::invalid_argument
/// when fewer than 5 such lags remain or the fitted decay is not positive.
ExpFit fit_exponential(const CorrFunction& corr, int min_lag = 1,
                       int max_lag = 40, long min_samples = 100);

}  // namespace rvol
