#include "doctest.h"
#include "oracles.hpp"

#include <rvol/simulation.hpp>
#include <rvol/stats.hpp>

#include <cmath>
#include <cstring>
#include <vector>

using namespace rvol;

namespace {

bool close_rel(double a, double b, double tol) {
  return std::abs(a - b) <= tol * std::max({1.0, std::abs(a), std::abs(b)});
}

}  // namespace

TEST_SUITE("simulation") {

TEST_CASE("rng streams are deterministic and distinct") {
  Rng a(12345);
  Rng b(12345);
  for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());

  Rng s0 = Rng::for_stream(9, 0);
  Rng s1 = Rng::for_stream(9, 1);
  int diff = 0;
  for (int i = 0; i < 32; ++i) diff += s0.next_u64() != s1.next_u64();
  CHECK(diff > 24);

  CHECK(Rng::splitmix64(0) == Rng::splitmix64(0));
  CHECK(Rng::splitmix64(1) != Rng::splitmix64(2));
}

TEST_CASE("uniform and normal draws are sane") {
  Rng rng(77);
  double sum = 0.0, sum2 = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double u = rng.uniform();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    sum += u;
    sum2 += u * u;
  }
  CHECK(std::abs(sum / n - 0.5) < 0.005);
  CHECK(std::abs(sum2 / n - 1.0 / 3.0) < 0.005);

  double nsum = 0.0, nsum2 = 0.0, nsum4 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double z = rng.normal();
    nsum += z;
    nsum2 += z * z;
    nsum4 += z * z * z * z;
  }
  CHECK(std::abs(nsum / n) < 0.01);
  CHECK(std::abs(nsum2 / n - 1.0) < 0.02);
  CHECK(std::abs(nsum4 / n - 3.0) < 0.15);

  for (int i = 0; i < 1000; ++i) CHECK(rng.uniform_below(7) < 7);
}

TEST_CASE("config validation") {
  SimConfig c;
  CHECK_NOTHROW(c.validate());
  c.n_steps = 50;
  c.burn_in = 50;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c = SimConfig{};
  c.sigma_tilde_const = 0.0;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c = SimConfig{};
  c.initial_price = -1.0;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c = SimConfig{};
  c.burn_in = -1;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
}

TEST_CASE("simulation is reproducible and seed sensitive") {
  SimConfig c;
  c.n_steps = 500;
  c.burn_in = 20;
  c.seed = 42;
  SimResult r1 = simulate_index_path(c);
  SimResult r2 = simulate_index_path(c);
  CHECK(r1.series == r2.series);
  REQUIRE(r1.sigma.size() == r2.sigma.size());
  for (std::size_t i = 0; i < r1.sigma.size(); ++i) {
    CHECK(std::memcmp(&r1.sigma[i], &r2.sigma[i], sizeof(double)) == 0);
    CHECK(std::memcmp(&r1.level[i], &r2.level[i], sizeof(double)) == 0);
  }

  c.seed = 43;
  SimResult r3 = simulate_index_path(c);
  CHECK(r3.series.prices != r1.series.prices);

  CHECK(simulate_index(c) == r3.series);
}

TEST_CASE("output shape and positivity") {
  SimConfig c;
  c.n_steps = 300;
  c.burn_in = 50;
  c.seed = 7;
  SimResult r = simulate_index_path(c);
  CHECK(r.series.size() == static_cast<std::size_t>(c.n_steps - c.burn_in + 1));
  CHECK(r.sigma.size() == r.series.size());
  CHECK(r.level.size() == r.series.size());
  for (double p : r.series.prices) CHECK(p > 0.0);
  for (double s : r.sigma) CHECK(s > 0.0);
  for (std::size_t i = 1; i < r.series.dates.size(); ++i)
    CHECK(r.series.dates[i - 1] < r.series.dates[i]);

  c.burn_in = 0;
  SimResult r0 = simulate_index_path(c);
  CHECK(r0.series.size() == static_cast<std::size_t>(c.n_steps + 1));
  CHECK(r0.sigma.front() == c.sigma_tilde_const);  // levels start at the spot
  CHECK(r0.level.front() == c.initial_price);
}

TEST_CASE("level trace is bounded by the filter saturation") {
  SimConfig c;
  c.n_steps = 4000;
  c.seed = 11;
  SimResult r = simulate_index_path(c);
  const double cap = (1.0 + 0.3) * (1.0 + 0.3);  // both factors within 1/phi
  for (std::size_t i = 0; i < r.series.size(); ++i) {
    const double ratio = r.level[i] / r.series.prices[i];
    CHECK(ratio < cap);
    CHECK(ratio > 1.0 / cap);
    CHECK(close_rel(r.sigma[i], c.sigma_tilde_const * ratio, 1e-12));
  }
}

TEST_CASE("renormalized returns have the configured scale") {
  SimConfig c;
  c.n_steps = 10000;
  c.seed = 5;
  SimResult r = simulate_index_path(c);
  std::vector<double> renorm;
  for (std::size_t t = 1; t < r.series.size(); ++t)
    renorm.push_back((r.series.prices[t] - r.series.prices[t - 1]) / r.level[t]);
  const double sd = std::sqrt(sample_variance(renorm));
  CHECK(std::abs(sd / c.sigma_tilde_const - 1.0) < 0.05);
}

TEST_CASE("simulation follows the documented recursion exactly") {
  SimConfig c;
  c.n_steps = 400;
  c.burn_in = 0;
  c.seed = 31337;
  SimResult got = simulate_index_path(c);

  // Replay: one normal per accepted step, redraw while the price would be
  // non-positive, levels updated with the accepted price.
  Rng rng = Rng::for_stream(c.seed, 0);
  EstimatorParams p = c.estimator;
  ReactiveState st = init_state(c.initial_price, p, 0);
  st.sigma_tilde_sq = c.sigma_tilde_const * c.sigma_tilde_const;
  double price = c.initial_price;
  std::vector<double> prices{price};
  for (long t = 0; t < c.n_steps; ++t) {
    const double sigma = c.sigma_tilde_const * st.level / price;
    double next = 0.0;
    do {
      next = price * (1.0 + sigma * rng.normal());
    } while (next <= 0.0);
    update_index(st, next, p);
    price = next;
    prices.push_back(price);
  }
  REQUIRE(prices.size() == got.series.prices.size());
  for (std::size_t i = 0; i < prices.size(); ++i)
    CHECK(prices[i] == got.series.prices[i]);
}

TEST_CASE("violent vol forces resampling but never a negative price") {
  SimConfig c;
  c.n_steps = 300;
  c.burn_in = 0;
  c.sigma_tilde_const = 0.5;
  c.seed = 3;
  SimResult r = simulate_index_path(c);
  CHECK(r.resamples > 0);
  for (double p : r.series.prices) CHECK(p > 0.0);
}

TEST_CASE("leverage correlation matches the double-loop reference") {
  std::mt19937_64 gen(71);
  std::normal_distribution<double> eps(0.0, 0.02);
  for (int inst = 0; inst < 30; ++inst) {
    std::vector<double> prices{100.0};
    for (int i = 0; i < 40; ++i) prices.push_back(prices.back() * std::exp(eps(gen)));
    PriceSeries s;
    s.instrument_id = "x";
    s.dates.clear();
    Date d = Date::parse("2015-01-05");
    for (std::size_t i = 0; i < prices.size(); ++i) {
      s.dates.push_back(d);
      d = d.next_day();
    }
    s.prices = prices;

    CorrFunction corr = leverage_correlation(s, 6);
    auto want = oracle::leverage_corr(prices, 6);
    REQUIRE(corr.values.size() == 6);
    for (int tau = 1; tau <= 6; ++tau) {
      CHECK(corr.taus[tau - 1] == tau);
      CHECK(close_rel(corr.values[tau - 1], want[tau - 1], 1e-12));
      CHECK(corr.n_samples[tau - 1] ==
            static_cast<long>(prices.size()) - 1 - tau);
    }
  }
}

TEST_CASE("leverage correlation input guards") {
  std::vector<double> p(10, 100.0);
  PriceSeries s;
  s.instrument_id = "flat";
  Date d = Date::parse("2015-01-05");
  for (std::size_t i = 0; i < p.size(); ++i) {
    s.dates.push_back(d);
    d = d.next_day();
  }
  s.prices = p;
  CHECK_THROWS_AS(leverage_correlation(s, 20), std::invalid_argument);  // too short
  CHECK_THROWS_AS(leverage_correlation(s, 0), std::invalid_argument);
  CHECK_THROWS_AS(leverage_correlation(s, 3), std::invalid_argument);   // flat
}

TEST_CASE("iid returns show no leverage correlation") {
  Rng rng(2);
  std::vector<double> prices{100.0};
  for (int i = 0; i < 100000; ++i) {
    prices.push_back(prices.back() * (1.0 + 0.01 * rng.normal()));
  }
  PriceSeries s;
  s.instrument_id = "iid";
  Date d = Date::parse("2000-01-03");
  for (std::size_t i = 0; i < prices.size(); ++i) {
    s.dates.push_back(d);
    d = d.next_day();
  }
  s.prices = prices;

  CorrFunction corr = leverage_correlation(s, 5);
  // Independent lags: Var(dx(t+tau)^2 dx(t)) = 3 sigma^6, so after the
  // 1/E[dx^2]^2 normalization the standard error is sqrt(3)/(sigma sqrt(n)).
  const double se = std::sqrt(3.0) / (0.01 * std::sqrt(100000.0));
  for (double v : corr.values) CHECK(std::abs(v) < 5.0 * se);
}

TEST_CASE("simulated default dynamics produce a negative correlation") {
  SimConfig c;
  c.n_steps = 30000;
  c.seed = 8;
  SimResult r = simulate_index_path(c);
  CorrFunction corr = leverage_correlation(r.series, 5);
  for (double v : corr.values) CHECK(v < 0.0);
  CHECK(corr.values[0] < -8.0);
  CHECK(corr.values[0] > -25.0);
}

TEST_CASE("exponential fit recovers an exact decay") {
  CorrFunction corr;
  for (int tau = 1; tau <= 40; ++tau) {
    corr.taus.push_back(tau);
    corr.values.push_back(-18.0 * std::exp(-tau / 9.3));
    corr.n_samples.push_back(10000);
  }
  ExpFit fit = fit_exponential(corr);
  CHECK(fit.amplitude == doctest::Approx(18.0).epsilon(1e-9));
  CHECK(fit.time_constant == doctest::Approx(9.3).epsilon(1e-9));
  CHECK(fit.n_lags_used == 40);
  CHECK(fit.residual_norm < 1e-9);
}

TEST_CASE("exponential fit skips thin and non-negative lags") {
  CorrFunction corr;
  for (int tau = 1; tau <= 12; ++tau) {
    corr.taus.push_back(tau);
    corr.values.push_back(-10.0 * std::exp(-tau / 5.0));
    corr.n_samples.push_back(tau == 3 ? 10 : 1000);  // lag 3 under-sampled
  }
  corr.values[5] = 0.2;  // lag 6 positive
  ExpFit fit = fit_exponential(corr, 1, 12, 100);
  CHECK(fit.n_lags_used == 10);
  CHECK(fit.amplitude == doctest::Approx(10.0).epsilon(1e-6));
  CHECK(fit.time_constant == doctest::Approx(5.0).epsilon(1e-6));
}

TEST_CASE("exponential fit guards") {
  CorrFunction corr;
  for (int tau = 1; tau <= 6; ++tau) {
    corr.taus.push_back(tau);
    corr.values.push_back(0.5);  // no negative values at all
    corr.n_samples.push_back(1000);
  }
  CHECK_THROWS_AS(fit_exponential(corr), std::invalid_argument);

  CorrFunction grow;
  for (int tau = 1; tau <= 8; ++tau) {
    grow.taus.push_back(tau);
    grow.values.push_back(-std::exp(+0.3 * tau));  // growing magnitude
    grow.n_samples.push_back(1000);
  }
  CHECK_THROWS_AS(fit_exponential(grow), std::invalid_argument);
}

TEST_CASE("longer runs tighten the measured correlation") {
  double prev_residual = 1e300;
  for (long n : {1000L, 10000L, 100000L}) {
    SimConfig c;
    c.n_steps = n;
    c.seed = 4;
    SimResult r = simulate_index_path(c);
    CorrFunction corr = leverage_correlation(r.series, 20);
    ExpFit fit = fit_exponential(corr, 1, 20, 100);
    const double scaled = fit.residual_norm;
    CHECK(scaled < prev_residual);
    prev_residual = scaled;
  }
}

}  // TEST_SUITE
