#include "doctest.h"

#include <rvol/reactive.hpp>
#include <rvol/term_structure.hpp>

#include <cmath>
#include <random>

using namespace rvol;

TEST_SUITE("term_structure") {

TEST_CASE("long-term anchors scale the vol by spot over level") {
  EstimatorParams p;
  ReactiveState s = init_state(95.0, p, 0);
  s.slow_level = 100.0;
  s.fast_level = 96.0;
  s.level = 95.0;            // sigma == sigma_tilde
  s.sigma_tilde_sq = 4e-4;   // sigma = 0.02
  s.last_price = 95.0;

  LongTermVols lt = long_term_vols(s);
  CHECK(lt.slow == doctest::Approx(0.02 * 95.0 / 100.0).epsilon(1e-15));
  CHECK(lt.slow == doctest::Approx(0.019).epsilon(1e-15));
  CHECK(lt.fast == doctest::Approx(0.02 * 95.0 / 96.0).epsilon(1e-15));

  ReactiveState blank;
  CHECK_THROWS_AS(long_term_vols(blank), std::invalid_argument);
}

TEST_CASE("maturity weight limits and monotonicity") {
  CHECK(maturity_weight(0.0241, 1e-12) == doctest::Approx(1.0).epsilon(1e-12));
  // Large-maturity tail: w ~ 1 / (lambda * T).
  CHECK(maturity_weight(0.0241, 1e6) ==
        doctest::Approx(1.0 / (0.0241 * 1e6)).epsilon(1e-9));

  std::mt19937_64 gen(3);
  std::uniform_real_distribution<double> lam(0.001, 0.9);
  std::uniform_real_distribution<double> mat(0.01, 500.0);
  for (int i = 0; i < 200; ++i) {
    const double l = lam(gen);
    const double t = mat(gen);
    const double w = maturity_weight(l, t);
    CHECK(w > 0.0);
    CHECK(w <= 1.0);
    CHECK(maturity_weight(l, t * 1.5) < w);  // decreasing in maturity
  }
  CHECK_THROWS_AS(maturity_weight(0.0, 10.0), std::invalid_argument);
  CHECK_THROWS_AS(maturity_weight(0.1, 0.0), std::invalid_argument);
}

TEST_CASE("one-month vol from the default lambdas") {
  TermVolInputs in;
  in.sigma_inst = 0.02;
  in.sigma_fast_lt = 0.018;
  in.sigma_slow_lt = 0.015;
  in.maturity = 21.0;

  CHECK(maturity_weight(in.lambda_fast, 21.0) ==
        doctest::Approx(0.30666268107170758).epsilon(1e-15));
  CHECK(maturity_weight(in.lambda_slow, 21.0) ==
        doctest::Approx(0.78474197929045031).epsilon(1e-15));

  TermVol tv = sigma_at_maturity(in);
  CHECK_FALSE(tv.clamped);
  CHECK(tv.sigma == doctest::Approx(0.018055354322505119).epsilon(1e-14));
}

TEST_CASE("short maturities recover the instantaneous vol") {
  TermVolInputs in;
  in.sigma_inst = 0.023;
  in.sigma_fast_lt = 0.019;
  in.sigma_slow_lt = 0.016;
  in.maturity = 1e-12;
  CHECK(sigma_at_maturity(in).sigma == doctest::Approx(0.023).epsilon(1e-12));
}

TEST_CASE("long maturities settle on the slow anchor") {
  // The residual scales with the variance gaps over lambda * T, so the
  // 1e-9 limit needs gaps at the 1e-5 relative level for T = 1e6.
  TermVolInputs in;
  in.sigma_inst = 0.02 * (1.0 + 2e-5);
  in.sigma_fast_lt = 0.02 * (1.0 + 1e-5);
  in.sigma_slow_lt = 0.02;
  in.maturity = 1e6;
  CHECK(std::abs(sigma_at_maturity(in).sigma - in.sigma_slow_lt) < 1e-9);

  // Wider gaps: still converging at the 1/(lambda T) rate, visibly above it.
  in.sigma_inst = 0.0201;
  in.sigma_fast_lt = 0.0200;
  in.sigma_slow_lt = 0.0199;
  const double residual = sigma_at_maturity(in).sigma - in.sigma_slow_lt;
  CHECK(residual > 0.0);
  CHECK(residual < 1e-8);
}

TEST_CASE("equal inputs give a flat curve") {
  TermVolInputs in;
  in.sigma_inst = in.sigma_fast_lt = in.sigma_slow_lt = 0.017;
  for (double t : {0.5, 1.0, 21.0, 252.0, 5000.0}) {
    in.maturity = t;
    CHECK(sigma_at_maturity(in).sigma == doctest::Approx(0.017).epsilon(1e-14));
  }
}

TEST_CASE("ordered inputs interpolate monotonically in maturity") {
  std::mt19937_64 gen(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 50; ++i) {
    TermVolInputs in;
    in.sigma_slow_lt = 0.01 + 0.02 * u(gen);
    in.sigma_fast_lt = in.sigma_slow_lt * (1.0 + 0.5 * u(gen));
    in.sigma_inst = in.sigma_fast_lt * (1.0 + 0.5 * u(gen));
    double prev = sigma_at_maturity(in).sigma;  // default maturity 21
    CHECK(prev <= in.sigma_inst + 1e-15);
    for (double t : {42.0, 84.0, 252.0, 1000.0, 20000.0}) {
      in.maturity = t;
      const double cur = sigma_at_maturity(in).sigma;
      CHECK(cur <= prev + 1e-15);  // decays toward the slow anchor
      CHECK(cur >= in.sigma_slow_lt - 1e-15);
      prev = cur;
    }
  }
}

TEST_CASE("negative interpolated variance clamps to zero") {
  // Reachable only with inverted relaxation rates; the guard keeps the
  // output a real vol regardless of inputs.
  TermVolInputs in;
  in.sigma_inst = 0.0;
  in.sigma_fast_lt = 0.05;
  in.sigma_slow_lt = 0.0;
  in.lambda_slow = 0.9;
  in.lambda_fast = 0.001;
  in.maturity = 500.0;
  TermVol tv = sigma_at_maturity(in);
  CHECK(tv.clamped);
  CHECK(tv.sigma == 0.0);
}

TEST_CASE("input validation") {
  TermVolInputs in;
  in.maturity = 0.0;
  CHECK_THROWS_AS(sigma_at_maturity(in), std::invalid_argument);
  in.maturity = 21.0;
  in.sigma_inst = -0.01;
  CHECK_THROWS_AS(sigma_at_maturity(in), std::invalid_argument);
  in.sigma_inst = 0.02;
  in.lambda_fast = 0.0;
  CHECK_THROWS_AS(sigma_at_maturity(in), std::invalid_argument);
}

}  // TEST_SUITE
