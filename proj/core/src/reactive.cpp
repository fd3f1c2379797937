#include "rvol/reactive.hpp"

#include <cmath>
#include <stdexcept>

#include "rvol/errors.hpp"

namespace rvol {

void EstimatorParams::validate() const {
  if (!(lambda_slow > 0.0) || !(lambda_slow < lambda_fast) || !(lambda_fast < 1.0))
    throw std::invalid_argument("params: need 0 < lambda_slow < lambda_fast < 1");
  if (!(lambda_sigma > 0.0) || lambda_sigma > 1.0)
    throw std::invalid_argument("params: lambda_sigma outside (0, 1]");
  if (!(filter_steepness >= 0.0))
    throw std::invalid_argument("params: filter_steepness must be >= 0");
  if (!(leverage >= 0.0))
    throw std::invalid_argument("params: leverage must be >= 0");
}

double saturating_filter(double z, double steepness) {
  if (steepness == 0.0) return z;
  return std::tanh(steepness * z) / steepness;
}

ReactiveState init_state(double first_price, const EstimatorParams&, int warmup) {
  if (!(first_price > 0.0))
    throw std::invalid_argument("init_state: price must be positive");
  if (warmup < 0) throw std::invalid_argument("init_state: negative warmup");
  ReactiveState s;
  s.slow_level = first_price;
  s.fast_level = first_price;
  s.filtered_slow = first_price;
  s.level = first_price;
  s.sigma_tilde_sq = 0.0;
  s.last_price = first_price;
  s.warmup_remaining = warmup;
  return s;
}

namespace {

// One full update. The panic modulation reads the fast level and spot of
// mod_source when given, the state's own just-updated ones otherwise.
// Shared so the stock path degenerates to the index path bit for bit.
VolUpdate advance(ReactiveState& s, double new_price,
                  const ReactiveState* mod_source, const EstimatorParams& p) {
  const double prev_price = s.last_price;
  s.slow_level = (1.0 - p.lambda_slow) * s.slow_level + p.lambda_slow * new_price;
  s.fast_level = (1.0 - p.lambda_fast) * s.fast_level + p.lambda_fast * new_price;
  const double mod_fast = mod_source ? mod_source->fast_level : s.fast_level;
  const double mod_spot = mod_source ? mod_source->last_price : new_price;
  s.filtered_slow =
      new_price *
      (1.0 + saturating_filter((s.slow_level - new_price) / new_price,
                               p.filter_steepness));
  const double panic_arg = std::pow(mod_fast / mod_spot, p.leverage) - 1.0;
  s.level = s.filtered_slow *
            (1.0 + saturating_filter(panic_arg, p.filter_steepness));

  const double delta = new_price - prev_price;
  VolUpdate out;
  if (s.warmup_remaining > 0) {
    const double raw = delta / prev_price;
    s.warmup_count += 1;
    const double d = raw - s.warmup_mean;
    s.warmup_mean += d / static_cast<double>(s.warmup_count);
    s.warmup_m2 += d * (raw - s.warmup_mean);
    s.sigma_tilde_sq =
        s.warmup_count > 1 ? s.warmup_m2 / static_cast<double>(s.warmup_count - 1)
                           : 0.0;
    s.warmup_remaining -= 1;
    out.provisional = true;
  } else {
    const double renorm = delta / s.level;
    s.sigma_tilde_sq = (1.0 - p.lambda_sigma) * s.sigma_tilde_sq +
                       p.lambda_sigma * renorm * renorm;
    out.provisional = false;
  }
  s.last_price = new_price;
  out.sigma = std::sqrt(s.sigma_tilde_sq) * s.level / new_price;
  return out;
}

}  // namespace

VolUpdate update_index(ReactiveState& state, double new_price,
                       const EstimatorParams& params) {
  if (!state.initialized())
    throw std::invalid_argument("update_index: uninitialized state");
  if (!(new_price > 0.0))
    throw std::invalid_argument("update_index: price must be positive");
  return advance(state, new_price, nullptr, params);
}

VolUpdate update_stock(ReactiveState& stock, double new_stock_price,
                       const ReactiveState& index,
                       const EstimatorParams& params) {
  if (!stock.initialized())
    throw std::invalid_argument("update_stock: uninitialized stock state");
  if (!index.initialized())
    throw std::invalid_argument("update_stock: uninitialized index state");
  if (!(new_stock_price > 0.0))
    throw std::invalid_argument("update_stock: price must be positive");
  return advance(stock, new_stock_price, &index, params);
}

double taylor_level(const ReactiveState& state, const EstimatorParams& params) {
  if (!state.initialized())
    throw std::invalid_argument("taylor_level: uninitialized state");
  return state.filtered_slow *
         (1.0 + params.leverage * (state.fast_level - state.last_price) /
                    state.fast_level);
}

double reactive_sigma(const ReactiveState& state) {
  if (!state.initialized())
    throw std::invalid_argument("reactive_sigma: uninitialized state");
  return std::sqrt(state.sigma_tilde_sq) * state.level / state.last_price;
}

EstimateResult estimate_index_vol(const PriceSeries& index,
                                  const EstimatorParams& params, int warmup) {
  params.validate();
  index.validate();
  if (index.size() < 2)
    throw data_error(index.instrument_id + ": need at least 2 prices");

  EstimateResult res;
  res.vols.instrument_id = index.instrument_id;
  ReactiveState st = init_state(index.prices[0], params, warmup);
  for (std::size_t i = 1; i < index.size(); ++i) {
    const VolUpdate u = update_index(st, index.prices[i], params);
    res.vols.dates.push_back(index.dates[i]);
    res.vols.sigmas.push_back(u.sigma);
    res.vols.provisional.push_back(u.provisional ? 1 : 0);
  }
  res.final_state = st;
  return res;
}

EstimateResult estimate_stock_vol(const PriceSeries& stock,
                                  const PriceSeries& index,
                                  const EstimatorParams& params, int warmup) {
  params.validate();
  stock.validate();
  index.validate();
  if (stock.size() < 2)
    throw data_error(stock.instrument_id + ": need at least 2 prices");
  if (index.size() < 1)
    throw data_error(index.instrument_id + ": empty index");

  EstimateResult res;
  res.vols.instrument_id = stock.instrument_id;

  ReactiveState idx = init_state(index.prices[0], params, warmup);
  ReactiveState stk;
  std::size_t j = 1;  // next index row to apply

  for (std::size_t i = 0; i < stock.size(); ++i) {
    const Date d = stock.dates[i];
    // Advance the index through every date up to and including d.
    while (j < index.size() && index.dates[j] <= d) {
      update_index(idx, index.prices[j], params);
      ++j;
    }
    if (i == 0) {
      stk = init_state(stock.prices[0], params, warmup);
      continue;
    }
    // Rows 0..j-1 are applied, so the index state sits at dates[j-1].
    if (index.dates[j - 1] != d)
      throw data_error(stock.instrument_id + ": index has no row for " +
                       d.to_string());
    const VolUpdate u = update_stock(stk, stock.prices[i], idx, params);
    res.vols.dates.push_back(d);
    res.vols.sigmas.push_back(u.sigma);
    res.vols.provisional.push_back(u.provisional ? 1 : 0);
  }
  res.final_state = stk;
  return res;
}

void to_json(nlohmann::json& j, const EstimatorParams& p) {
  j = nlohmann::json{{"lambda_slow", p.lambda_slow},
                     {"lambda_fast", p.lambda_fast},
                     {"lambda_sigma", p.lambda_sigma},
                     {"filter_steepness", p.filter_steepness},
                     {"leverage", p.leverage}};
}

void from_json(const nlohmann::json& j, EstimatorParams& p) {
  j.at("lambda_slow").get_to(p.lambda_slow);
  j.at("lambda_fast").get_to(p.lambda_fast);
  j.at("lambda_sigma").get_to(p.lambda_sigma);
  j.at("filter_steepness").get_to(p.filter_steepness);
  j.at("leverage").get_to(p.leverage);
}

void to_json(nlohmann::json& j, const ReactiveState& s) {
  j = nlohmann::json{{"slow_level", s.slow_level},
                     {"fast_level", s.fast_level},
                     {"filtered_slow", s.filtered_slow},
                     {"level", s.level},
                     {"sigma_tilde_sq", s.sigma_tilde_sq},
                     {"last_price", s.last_price},
                     {"warmup_remaining", s.warmup_remaining},
                     {"warmup_count", s.warmup_count},
                     {"warmup_mean", s.warmup_mean},
                     {"warmup_m2", s.warmup_m2}};
}

void from_json(const nlohmann::json& j, ReactiveState& s) {
  j.at("slow_level").get_to(s.slow_level);
  j.at("fast_level").get_to(s.fast_level);
  j.at("filtered_slow").get_to(s.filtered_slow);
  j.at("level").get_to(s.level);
  j.at("sigma_tilde_sq").get_to(s.sigma_tilde_sq);
  j.at("last_price").get_to(s.last_price);
  j.at("warmup_remaining").get_to(s.warmup_remaining);
  j.at("warmup_count").get_to(s.warmup_count);
  j.at("warmup_mean").get_to(s.warmup_mean);
  j.at("warmup_m2").get_to(s.warmup_m2);
}

}  // namespace rvol
