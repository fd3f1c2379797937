#pragma once

#include "rvol/reactive.hpp"

namespace rvol {

inline constexpr double kStepsPerMonth = 21.0;

/// Long-horizon vol anchors implied by an updated state:
/// slow = sigma * spot / slow_level, fast = sigma * spot / fast_level.
struct LongTermVols {
  double slow = 0.0;
  double fast = 0.0;
};

/// Throws std::invalid_argument on an uninitialized state.
LongTermVols long_term_vols(const ReactiveState& state);

/// Inputs for the maturity interpolation. Maturity is in trading steps.
struct TermVolInputs {
  double sigma_inst = 0.0;     // instantaneous reactive vol
  double sigma_fast_lt = 0.0;  // fast-level anchor
  double sigma_slow_lt = 0.0;  // slow-level anchor
  double lambda_slow = 0.0241;
  double lambda_fast = 0.1484;
  double maturity = kStepsPerMonth;
};

struct TermVol {
  double sigma = 0.0;
  bool clamped = false;  // negative interpolated variance clamped to 0
};

/// (1 - exp(-lambda * maturity)) / (lambda * maturity), computed via expm1;
/// tends to 1 as maturity -> 0 and decays like 1/(lambda * maturity).
double maturity_weight(double lambda, double maturity);

/// Average vol over a maturity: the squared instantaneous-minus-fast and
/// fast-minus-slow variance gaps relax with the fast and slow weights on top
/// of the slow anchor. Throws std::invalid_argument on non-positive maturity,
/// non-positive lambdas or negative vols.
TermVol sigma_at_maturity(const TermVolInputs& in);

}  // namespace rvol
