#include "rvol/term_structure.hpp"

#include <cmath>
#include <stdexcept>

namespace rvol {

LongTermVols long_term_vols(const ReactiveState& state) {
  if (!state.initialized())
    throw std::invalid_argument("long_term_vols: uninitialized state");
  const double sigma = reactive_sigma(state);
  LongTermVols out;
  out.slow = sigma * state.last_price / state.slow_level;
  out.fast = sigma * state.last_price / state.fast_level;
  return out;
}

double maturity_weight(double lambda, double maturity) {
  const double x = lambda * maturity;
  if (!(x > 0.0)) throw std::invalid_argument("maturity_weight: need lambda * T > 0");
  return -std::expm1(-x) / x;
}

TermVol sigma_at_maturity(const TermVolInputs& in) {
  if (!(in.maturity > 0.0))
    throw std::invalid_argument("sigma_at_maturity: maturity must be positive");
  if (!(in.lambda_slow > 0.0) || !(in.lambda_fast > 0.0))
    throw std::invalid_argument("sigma_at_maturity: lambdas must be positive");
  if (in.sigma_inst < 0.0 || in.sigma_fast_lt < 0.0 || in.sigma_slow_lt < 0.0)
    throw std::invalid_argument("sigma_at_maturity: negative vol input");

  const double wf = maturity_weight(in.lambda_fast, in.maturity);
  const double ws = maturity_weight(in.lambda_slow, in.maturity);
  const double var =
      (in.sigma_inst * in.sigma_inst - in.sigma_fast_lt * in.sigma_fast_lt) * wf +
      (in.sigma_fast_lt * in.sigma_fast_lt - in.sigma_slow_lt * in.sigma_slow_lt) * ws +
      in.sigma_slow_lt * in.sigma_slow_lt;

  TermVol out;
  if (var < 0.0) {
    out.sigma = 0.0;
    out.clamped = true;
  } else {
    out.sigma = std::sqrt(var);
    out.clamped = false;
  }
  return out;
}

}  // namespace rvol
