#pragma once

#include <cstdint>
#include <nlohmann/json.hpp>
#include <string>
#include <vector>

#include "rvol/timeseries.hpp"

namespace rvol {

/// Parameters of the reactive volatility estimator.
///
/// Two EMA price levels (slow and fast) track the spot. The slow level,
/// saturated by the filter, captures the retarded part of the leverage
/// effect; the fast level, raised to the leverage power, captures the
/// panic amplification. lambda_sigma drives the variance EMA.
struct EstimatorParams {
  double lambda_slow = 0.0241;
  double lambda_fast = 0.1484;
  double lambda_sigma = 0.025;
  double filter_steepness = 1.0 / 0.3;  // phi; 0 disables saturation
  double leverage = 8.0;                // panic exponent

  /// Throws std::invalid_argument unless
  /// 0 < lambda_slow < lambda_fast < 1, 0 < lambda_sigma <= 1,
  /// filter_steepness >= 0 and leverage >= 0.
  void validate() const;
};

/// Saturating response filter: tanh(steepness * z) / steepness, the identity
/// when steepness == 0. Odd, bounded by 1/steepness, slope 1 at the origin.
double saturating_filter(double z, double steepness);

inline constexpr int kDefaultWarmup = 40;  // one lambda_sigma window

/// Sequential estimator state. All levels carry price units.
///
/// During warm-up, sigma_tilde_sq equals the running sample variance of the
/// raw returns seen so far (Welford accumulator fields below); once
/// warmup_remaining hits zero the EMA recursion takes over, seeded with the
/// warm-up sample variance.
struct ReactiveState {
  double slow_level = 0.0;     // EMA(lambda_slow) of the driving price
  double fast_level = 0.0;     // EMA(lambda_fast) of the driving price
  double filtered_slow = 0.0;  // spot * (1 + F((slow_level - spot) / spot))
  double level = 0.0;          // filtered_slow * panic modulation
  double sigma_tilde_sq = 0.0; // renormalized variance, >= 0
  double last_price = 0.0;
  int warmup_remaining = 0;
  std::int64_t warmup_count = 0;
  double warmup_mean = 0.0;
  double warmup_m2 = 0.0;

  bool initialized() const { return last_price > 0.0; }
  bool warm() const { return warmup_remaining == 0; }
};

/// All levels start at the first observed price.
ReactiveState init_state(double first_price, const EstimatorParams& params,
                         int warmup = kDefaultWarmup);

struct VolUpdate {
  double sigma = 0.0;        // per-step reactive vol, sigma_tilde * L / spot
  bool provisional = false;  // true while the warm-up window is open
};

/// Advances the state by one index observation. Order within the step:
/// EMA levels, filtered slow level, combined level, variance, vol; the
/// variance update uses the combined level of the same step.
/// Throws std::invalid_argument on an uninitialized state or a
/// non-positive price.
VolUpdate update_index(ReactiveState& state, double new_price,
                       const EstimatorParams& params);

/// Advances a single-stock state: the slow branch runs on the stock price,
/// the panic modulation is taken from the index state (fast level and index
/// spot), which must already be updated for the same observation date.
/// Driving a state with the index's own series and itself as modulation
/// source reproduces update_index exactly.
VolUpdate update_stock(ReactiveState& stock, double new_stock_price,
                       const ReactiveState& index,
                       const EstimatorParams& params);

/// First-order form of the combined level,
/// filtered_slow * (1 + leverage * (fast_level - spot) / fast_level).
/// Close to state.level only while the fast level is near the spot.
double taylor_level(const ReactiveState& state, const EstimatorParams& params);

/// sigma_tilde * level / spot for an updated state.
double reactive_sigma(const ReactiveState& state);

/// Per-date vol outputs; provisional[i] marks warm-up dates.
struct VolSeries {
  std::string instrument_id;
  std::vector<Date> dates;
  std::vector<double> sigmas;
  std::vector<std::uint8_t> provisional;

  std::size_t size() const { return sigmas.size(); }
};

struct EstimateResult {
  VolSeries vols;            // one entry per return date
  ReactiveState final_state;
};

EstimateResult estimate_index_vol(const PriceSeries& index,
                                  const EstimatorParams& params,
                                  int warmup = kDefaultWarmup);

/// Runs the index state through the index series and the stock state through
/// the stock series in one date-ordered sweep (index first on shared dates).
/// Throws data_error if the stock trades on a date the index lacks.
EstimateResult estimate_stock_vol(const PriceSeries& stock,
                                  const PriceSeries& index,
                                  const EstimatorParams& params,
                                  int warmup = kDefaultWarmup);

// JSON snapshots; numeric fields survive a round trip bit-exactly.
void to_json(nlohmann::json& j, const EstimatorParams& p);
void from_json(const nlohmann::json& j, EstimatorParams& p);
void to_json(nlohmann::json& j, const ReactiveState& s);
void from_json(const nlohmann::json& j, ReactiveState& s);

}  // namespace rvol
