#include "doctest.h"
#include "test_helpers.hpp"

#include <rvol/errors.hpp>
#include <rvol/stats.hpp>
#include <rvol/timeseries.hpp>

#include <cmath>
#include <cstring>
#include <random>

using namespace rvol;
using testutil::ScratchDir;

TEST_SUITE("timeseries") {

TEST_CASE("date parse and format round trip") {
  const char* samples[] = {"1970-01-01", "1999-12-31", "2000-02-29",
                           "2010-01-04", "2024-02-29", "2063-07-19"};
  for (const char* s : samples) {
    Date d = Date::parse(s);
    CHECK(d.to_string() == s);
    CHECK(Date::from_serial(d.serial()) == d);
  }
  CHECK(Date::parse("1970-01-01").serial() == 0);
  CHECK(Date::parse("1970-01-02").serial() == 1);
  CHECK(Date::parse("1969-12-31").serial() == -1);
}

TEST_CASE("date ordering and next_day") {
  Date a = Date::parse("2020-02-28");
  CHECK(a.next_day() == Date::parse("2020-02-29"));
  CHECK(a.next_day().next_day() == Date::parse("2020-03-01"));
  CHECK(a < a.next_day());
  CHECK(Date::parse("2019-12-31") < Date::parse("2020-01-01"));
}

TEST_CASE("date rejects malformed input") {
  const char* bad[] = {"2020-13-01", "2020-00-10", "2020-01-32", "2021-02-29",
                       "20-01-01",   "2020/01/01", "2020-1-01",  "2020-01-01x",
                       "",           "abcd-ef-gh"};
  for (const char* s : bad) {
    CHECK_THROWS_AS(Date::parse(s), data_error);
  }
}

TEST_CASE("loader reads a well formed file") {
  ScratchDir dir;
  testutil::write_text(dir.file("spx.csv"),
                       "date,close\n"
                       "2020-01-02,100.5\n"
                       "2020-01-03,101.25\n"
                       "2020-01-06,99.875\n");
  PriceSeries s = load_price_series(dir.file("spx.csv"));
  CHECK(s.instrument_id == "spx");
  REQUIRE(s.dates.size() == 3);
  CHECK(s.dates[0] == Date::parse("2020-01-02"));
  CHECK(s.prices[0] == 100.5);
  CHECK(s.prices[2] == 99.875);
}

TEST_CASE("loader sorts rows, skips comments, strips BOM and CRLF") {
  ScratchDir dir;
  testutil::write_text(dir.file("x.csv"),
                       "\xEF\xBB\xBF"
                       "date,close\r\n"
                       "# provenance line\r\n"
                       "2020-01-03,2.0\r\n"
                       "2020-01-02,1.0\r\n");
  PriceSeries s = load_price_series(dir.file("x.csv"));
  REQUIRE(s.dates.size() == 2);
  CHECK(s.dates[0] == Date::parse("2020-01-02"));
  CHECK(s.prices[0] == 1.0);
  CHECK(s.prices[1] == 2.0);
}

TEST_CASE("loader errors carry row numbers") {
  ScratchDir dir;

  testutil::write_text(dir.file("m.csv"), "date,close\n2020-01-02,1.0,extra\n");
  CHECK_THROWS_WITH_AS(load_price_series(dir.file("m.csv")),
                       doctest::Contains("row 2"), data_error);

  testutil::write_text(dir.file("d.csv"), "date,close\n2020-01-99,1.0\n");
  CHECK_THROWS_WITH_AS(load_price_series(dir.file("d.csv")),
                       doctest::Contains("row 2"), data_error);

  testutil::write_text(dir.file("p.csv"),
                       "date,close\n2020-01-02,1.0\n2020-01-03,-4\n");
  CHECK_THROWS_WITH_AS(load_price_series(dir.file("p.csv")),
                       doctest::Contains("row 3"), data_error);

  testutil::write_text(dir.file("dup.csv"),
                       "date,close\n2020-01-02,1.0\n2020-01-02,2.0\n");
  CHECK_THROWS_WITH_AS(load_price_series(dir.file("dup.csv")),
                       doctest::Contains("2020-01-02"), data_error);

  testutil::write_text(dir.file("h.csv"), "day,price\n2020-01-02,1.0\n");
  CHECK_THROWS_AS(load_price_series(dir.file("h.csv")), data_error);

  CHECK_THROWS_AS(load_price_series(dir.file("absent.csv")), io_error);
}

TEST_CASE("loader honours custom column names and positivity toggle") {
  ScratchDir dir;
  testutil::write_text(dir.file("v.csv"),
                       "day,level\n2020-01-02,-3.5\n2020-01-03,0.0\n");
  CsvFormat fmt;
  fmt.date_column = "day";
  fmt.value_column = "level";
  fmt.require_positive = false;
  ValueSeries v = load_value_series(dir.file("v.csv"), fmt);
  REQUIRE(v.values.size() == 2);
  CHECK(v.values[0] == -3.5);
  CHECK(v.values[1] == 0.0);
}

TEST_CASE("save then load reproduces doubles bit for bit") {
  ScratchDir dir;
  PriceSeries s = testutil::make_prices(
      {100.0, 1.0 / 3.0, 99.999999999999986, 0.1, 12345.678901234567, 1e-300});
  save_price_series(s, dir.file("rt.csv"));
  PriceSeries back = load_price_series(dir.file("rt.csv"));
  REQUIRE(back.prices.size() == s.prices.size());
  for (std::size_t i = 0; i < s.prices.size(); ++i) {
    CHECK(std::memcmp(&back.prices[i], &s.prices[i], sizeof(double)) == 0);
    CHECK(back.dates[i] == s.dates[i]);
  }
}

TEST_CASE("arithmetic returns") {
  PriceSeries s = testutil::make_prices({100.0, 110.0, 99.0});
  ReturnSeries r = arithmetic_returns(s);
  REQUIRE(r.returns.size() == 2);
  CHECK(r.dates.size() == 2);
  CHECK(r.dates[0] == s.dates[1]);
  CHECK(r.returns[0] == doctest::Approx(0.10).epsilon(1e-14));
  CHECK(r.returns[1] == doctest::Approx(-0.10).epsilon(1e-14));

  PriceSeries tiny = testutil::make_prices({100.0});
  CHECK_THROWS_AS(arithmetic_returns(tiny), data_error);
}

TEST_CASE("ema update stays between its operands") {
  std::mt19937_64 gen(7);
  std::uniform_real_distribution<double> val(-50.0, 50.0);
  std::uniform_real_distribution<double> lam(1e-6, 1.0);
  for (int i = 0; i < 200; ++i) {
    const double prev = val(gen);
    const double x = val(gen);
    const double l = lam(gen);
    const double out = ema_update(prev, x, l);
    CHECK(out >= std::min(prev, x) - 1e-12);
    CHECK(out <= std::max(prev, x) + 1e-12);
  }
  CHECK(ema_update(1.0, 3.0, 0.5) == 2.0);
  CHECK(ema_update(4.0, 9.0, 1.0) == 9.0);
  CHECK_THROWS_AS(ema_update(1.0, 2.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(ema_update(1.0, 2.0, 1.5), std::invalid_argument);
}

TEST_CASE("align_by_date keeps the date intersection in order") {
  ValueSeries a;
  a.instrument_id = "a";
  a.dates = {Date::parse("2020-01-02"), Date::parse("2020-01-03"),
             Date::parse("2020-01-06")};
  a.values = {1.0, 2.0, 3.0};
  ValueSeries b;
  b.instrument_id = "b";
  b.dates = {Date::parse("2020-01-03"), Date::parse("2020-01-06"),
             Date::parse("2020-01-07")};
  b.values = {20.0, 30.0, 40.0};
  auto [av, bv] = align_by_date(a, b);
  REQUIRE(av.size() == 2);
  CHECK(av[0] == 2.0);
  CHECK(av[1] == 3.0);
  CHECK(bv[0] == 20.0);
  CHECK(bv[1] == 30.0);
}

TEST_CASE("basic stats helpers") {
  std::vector<double> x = {1.0, 2.0, 3.0, 4.0};
  CHECK(mean(x) == 2.5);
  CHECK(sample_variance(x) == doctest::Approx(5.0 / 3.0).epsilon(1e-15));
  CHECK(sample_variance(std::vector<double>{7.0}) == 0.0);

  // Normal-like symmetric two-point data has excess kurtosis -2.
  std::vector<double> pm;
  for (int i = 0; i < 100; ++i) pm.push_back(i % 2 == 0 ? 1.0 : -1.0);
  CHECK(excess_kurtosis(pm) == doctest::Approx(-2.0).epsilon(1e-12));

  // Alternating series has lag-1 autocorrelation near -1.
  CHECK(autocorrelation(pm, 1) == doctest::Approx(-1.0).epsilon(0.05));

  std::vector<double> xs = {0.0, 1.0, 2.0, 3.0};
  std::vector<double> ys = {1.0, 3.0, 5.0, 7.0};
  auto fit = linear_fit(xs, ys);
  CHECK(fit.slope == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(fit.intercept == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(fit.r_squared == doctest::Approx(1.0).epsilon(1e-14));
  CHECK_THROWS_AS(linear_fit(std::vector<double>{1.0, 1.0},
                                    std::vector<double>{1.0, 2.0}),
                  std::invalid_argument);
}

TEST_CASE("annualization uses 252 steps") {
  CHECK(annualize(0.01) == doctest::Approx(0.01 * std::sqrt(252.0)).epsilon(1e-15));
}

}  // TEST_SUITE
