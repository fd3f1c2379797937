#include "rvol/event_study.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "rvol/errors.hpp"
#include "rvol/simulation.hpp"
#include "rvol/stats.hpp"

namespace rvol {

std::string_view to_string(EventGroup g) {
  switch (g) {
    case EventGroup::kSystematicPositive: return "systematic_positive";
    case EventGroup::kSystematicNegative: return "systematic_negative";
    case EventGroup::kSpecificPositive: return "specific_positive";
    case EventGroup::kSpecificNegative: return "specific_negative";
  }
  return "unknown";
}

namespace {

void check_alignment(const ReturnSeries& returns, const VolSeries& vols) {
  if (vols.dates.size() != returns.dates.size() ||
      !std::equal(vols.dates.begin(), vols.dates.end(), returns.dates.begin()))
    throw data_error(returns.instrument_id +
                     ": vol series does not cover the return dates");
}

// Window rows t-delta..t+delta need sigma at rows t-delta-1..t+delta-1,
// all non-provisional and positive.
bool window_available(const VolSeries& vols, std::size_t n, std::size_t t,
                      int delta) {
  const auto d = static_cast<std::size_t>(delta);
  if (t < d + 1 || t + d > n - 1) return false;
  for (std::size_t i = t - d - 1; i <= t + d - 1; ++i)
    if (vols.provisional[i] || !(vols.sigmas[i] > 0.0)) return false;
  return true;
}

std::vector<double> build_window(const ReturnSeries& returns,
                                 const VolSeries& vols, std::size_t t,
                                 int delta) {
  const auto d = static_cast<std::size_t>(delta);
  std::vector<double> w;
  w.reserve(2 * d + 1);
  for (std::size_t row = t - d; row <= t + d; ++row)
    w.push_back(returns.returns[row] / vols.sigmas[row - 1]);
  return w;
}

QProfile profile_from_windows(const std::vector<const std::vector<double>*>& wins,
                              int delta, std::string label) {
  if (wins.empty())
    throw std::invalid_argument("q_profile: no events in group");
  const std::size_t width = 2 * static_cast<std::size_t>(delta) + 1;
  for (const auto* w : wins)
    if (w->size() != width)
      throw std::invalid_argument("q_profile: window sizes disagree");

  QProfile p;
  p.label = std::move(label);
  p.delta = delta;
  p.q.resize(width);
  p.counts.assign(width, static_cast<long>(wins.size()));
  for (std::size_t i = 0; i < width; ++i) {
    double ms = 0.0;
    for (const auto* w : wins) ms += (*w)[i] * (*w)[i];
    ms /= static_cast<double>(wins.size());
    p.q[i] = std::sqrt(ms) - 1.0;
  }
  double before = 0.0, after = 0.0;
  for (int k = 1; k <= delta; ++k) {
    before += p.q[static_cast<std::size_t>(delta - k)];
    after += p.q[static_cast<std::size_t>(delta + k)];
  }
  p.mean_before = before / delta;
  p.mean_after = after / delta;
  return p;
}

}  // namespace

std::vector<ExtremeEvent> detect_events(const ReturnSeries& returns,
                                        const VolSeries& vols, int delta,
                                        double threshold_mult) {
  if (delta < 1) throw std::invalid_argument("detect_events: delta must be >= 1");
  if (!(threshold_mult > 0.0))
    throw std::invalid_argument("detect_events: threshold must be > 0");
  check_alignment(returns, vols);

  const std::size_t n = returns.size();
  std::vector<ExtremeEvent> out;
  std::ptrdiff_t last_retained = -1;

  for (std::size_t t = 1; t < n; ++t) {
    if (vols.provisional[t - 1] || !(vols.sigmas[t - 1] > 0.0)) continue;
    if (!(std::abs(returns.returns[t]) > threshold_mult * vols.sigmas[t - 1]))
      continue;
    if (last_retained >= 0 &&
        static_cast<std::ptrdiff_t>(t) - last_retained <= delta)
      continue;  // de-dup: blocked by the previous retained crossing
    last_retained = static_cast<std::ptrdiff_t>(t);
    if (!window_available(vols, n, t, delta)) continue;

    ExtremeEvent e;
    e.instrument_id = returns.instrument_id;
    e.date = returns.dates[t];
    e.row = t;
    e.delta = delta;
    e.window = build_window(returns, vols, t, delta);
    e.normalized_return = e.window[static_cast<std::size_t>(delta)];
    out.push_back(std::move(e));
  }
  return out;
}

EventGroup classify_event(const ExtremeEvent& event,
                          const ReturnSeries& index_returns,
                          double index_threshold) {
  const auto it = std::lower_bound(index_returns.dates.begin(),
                                   index_returns.dates.end(), event.date);
  if (it == index_returns.dates.end() || *it != event.date)
    throw data_error(event.instrument_id + ": index has no return for " +
                     event.date.to_string());
  const double idx_ret =
      index_returns.returns[static_cast<std::size_t>(it - index_returns.dates.begin())];
  const bool systematic = std::abs(idx_ret) > index_threshold;
  const bool positive = event.normalized_return > 0.0;
  if (systematic)
    return positive ? EventGroup::kSystematicPositive
                    : EventGroup::kSystematicNegative;
  return positive ? EventGroup::kSpecificPositive
                  : EventGroup::kSpecificNegative;
}

QProfile q_profile(std::span<const ExtremeEvent> events, EventGroup group) {
  std::vector<const std::vector<double>*> wins;
  int delta = -1;
  for (const auto& e : events) {
    if (e.group != group) continue;
    wins.push_back(&e.window);
    delta = e.delta;
  }
  return profile_from_windows(wins, delta, std::string(to_string(group)));
}

QProfile q_profile_pooled(std::span<const ExtremeEvent> events,
                          std::string label) {
  std::vector<const std::vector<double>*> wins;
  int delta = -1;
  for (const auto& e : events) {
    wins.push_back(&e.window);
    delta = e.delta;
  }
  return profile_from_windows(wins, delta, std::move(label));
}

QProfile merge_q_profiles(std::span<const QProfile> profiles,
                          std::string label) {
  if (profiles.empty())
    throw std::invalid_argument("merge_q_profiles: empty input");
  const int delta = profiles[0].delta;
  const std::size_t width = 2 * static_cast<std::size_t>(delta) + 1;
  for (const auto& p : profiles)
    if (p.delta != delta || p.q.size() != width)
      throw std::invalid_argument("merge_q_profiles: deltas disagree");

  QProfile out;
  out.label = std::move(label);
  out.delta = delta;
  out.q.resize(width);
  out.counts.resize(width);
  for (std::size_t i = 0; i < width; ++i) {
    long total = 0;
    double ms = 0.0;
    for (const auto& p : profiles) {
      total += p.counts[i];
      ms += static_cast<double>(p.counts[i]) * (p.q[i] + 1.0) * (p.q[i] + 1.0);
    }
    if (total == 0) throw std::invalid_argument("merge_q_profiles: zero counts");
    out.counts[i] = total;
    out.q[i] = std::sqrt(ms / static_cast<double>(total)) - 1.0;
  }
  double before = 0.0, after = 0.0;
  for (int k = 1; k <= delta; ++k) {
    before += out.q[static_cast<std::size_t>(delta - k)];
    after += out.q[static_cast<std::size_t>(delta + k)];
  }
  out.mean_before = before / delta;
  out.mean_after = after / delta;
  return out;
}

double recovery_time(const QProfile& profile) {
  std::vector<double> ks, logs;
  for (int k = 1; k <= profile.delta; ++k) {
    const double q = profile.q[static_cast<std::size_t>(profile.delta + k)];
    if (!(q > 0.0)) continue;
    ks.push_back(static_cast<double>(k - 1));
    logs.push_back(std::log(q));
  }
  if (ks.size() < 3)
    throw std::invalid_argument("recovery_time: fewer than 3 positive points");
  const LinearFit fit = linear_fit(ks, logs);
  if (!(fit.slope < 0.0))
    throw std::invalid_argument("recovery_time: profile does not decay");
  return -1.0 / fit.slope;
}

TailFit tail_exponent(std::span<const double> normalized_returns,
                      std::string_view group, double threshold) {
  if (!(threshold > 0.0))
    throw std::invalid_argument("tail_exponent: threshold must be > 0");
  std::vector<double> tail;
  for (double v : normalized_returns) {
    const double a = std::abs(v);
    if (a >= threshold) tail.push_back(a);
  }
  if (tail.size() < 50)
    throw std::invalid_argument("tail_exponent: fewer than 50 tail samples");

  auto hill = [](std::span<const double> xs, double u) {
    double s = 0.0;
    for (double x : xs) s += std::log(x / u);
    return s > 0.0 ? static_cast<double>(xs.size()) / s : 0.0;
  };

  TailFit out;
  out.group = std::string(group);
  out.threshold = threshold;
  out.n_tail = tail.size();
  out.alpha = hill(tail, threshold);
  if (out.alpha == 0.0)
    throw std::invalid_argument("tail_exponent: degenerate tail sample");

  // Threshold-stability diagnostic: re-estimate above the tail median. A
  // power law is threshold-invariant; a faster-than-power tail drifts up.
  std::sort(tail.begin(), tail.end());
  const std::size_t half_start = tail.size() / 2;
  const double u2 = tail[half_start];
  std::span<const double> upper(tail.data() + half_start,
                                tail.size() - half_start);
  const double alpha2 = hill(upper, u2);
  const double allowance =
      std::max(0.4, 4.0 * out.alpha / std::sqrt(static_cast<double>(upper.size())));
  out.diverging = alpha2 == 0.0 || (alpha2 - out.alpha) > allowance;
  return out;
}

WarningStats warning_signal_stats(const ReturnSeries& returns,
                                  const VolSeries& vols,
                                  std::span<const ExtremeEvent> events,
                                  double multiplier, int lookback) {
  if (lookback < 1)
    throw std::invalid_argument("warning_signal_stats: lookback must be >= 1");
  if (multiplier < 0.0)
    throw std::invalid_argument("warning_signal_stats: negative multiplier");
  check_alignment(returns, vols);

  const std::size_t n = returns.size();
  const auto lb = static_cast<std::size_t>(lookback);
  std::vector<std::uint8_t> fired(n, 0);
  std::size_t n_warnings = 0;

  for (std::size_t t = lb; t < n; ++t) {
    if (vols.provisional[t - lb] || !(vols.sigmas[t - lb] > 0.0)) continue;
    double ss = 0.0;
    for (std::size_t i = t - lb + 1; i <= t; ++i)
      ss += returns.returns[i] * returns.returns[i];
    const double realized = std::sqrt(ss / static_cast<double>(lb));
    if (realized > multiplier * vols.sigmas[t - lb]) {
      fired[t] = 1;
      ++n_warnings;
    }
  }

  std::vector<std::uint8_t> is_event(n, 0);
  for (const auto& e : events)
    if (e.row < n) is_event[e.row] = 1;

  WarningStats ws;
  ws.multiplier = multiplier;
  ws.lookback = lookback;
  ws.n_events = events.size();
  ws.n_warnings = n_warnings;

  for (const auto& e : events) {
    bool warned = false;
    const std::size_t lo = e.row > lb ? e.row - lb : 0;
    for (std::size_t w = lo; w < e.row; ++w)
      if (fired[w]) warned = true;
    if (!warned) ++ws.n_missed;
  }
  for (std::size_t w = 0; w < n; ++w) {
    if (!fired[w]) continue;
    bool followed = false;
    const std::size_t hi = std::min(n - 1, w + lb);
    for (std::size_t t = w + 1; t <= hi; ++t)
      if (is_event[t]) followed = true;
    if (!followed) ++ws.n_false;
  }
  ws.missed_fraction =
      events.empty() ? 0.0
                     : static_cast<double>(ws.n_missed) /
                           static_cast<double>(events.size());
  ws.false_fraction =
      n_warnings == 0 ? 0.0
                      : static_cast<double>(ws.n_false) /
                            static_cast<double>(n_warnings);
  return ws;
}

QProfile random_baseline(const ReturnSeries& returns, const VolSeries& vols,
                         std::size_t n_samples, std::uint64_t seed,
                         int delta) {
  if (n_samples == 0)
    throw std::invalid_argument("random_baseline: n_samples must be > 0");
  check_alignment(returns, vols);

  const std::size_t n = returns.size();
  std::vector<std::size_t> admissible;
  for (std::size_t t = 1; t < n; ++t)
    if (window_available(vols, n, t, delta)) admissible.push_back(t);
  if (admissible.empty())
    throw std::invalid_argument("random_baseline: no admissible rows");

  Rng rng = Rng::for_stream(seed, 1);
  std::vector<std::size_t> rows;
  rows.reserve(n_samples);
  const bool with_replacement = n_samples > admissible.size();
  if (with_replacement) {
    for (std::size_t i = 0; i < n_samples; ++i)
      rows.push_back(admissible[rng.uniform_below(admissible.size())]);
  } else {
    // partial Fisher-Yates: the first n_samples entries are a uniform subset
    for (std::size_t i = 0; i < n_samples; ++i) {
      const std::size_t j =
          i + rng.uniform_below(admissible.size() - i);
      std::swap(admissible[i], admissible[j]);
      rows.push_back(admissible[i]);
    }
  }

  std::vector<std::vector<double>> windows;
  windows.reserve(rows.size());
  for (std::size_t t : rows) windows.push_back(build_window(returns, vols, t, delta));
  std::vector<const std::vector<double>*> ptrs;
  ptrs.reserve(windows.size());
  for (const auto& w : windows) ptrs.push_back(&w);

  QProfile p = profile_from_windows(ptrs, delta, "baseline");
  p.with_replacement = with_replacement;
  return p;
}

VolComparison conditional_vol_comparison(std::span<const ExtremeEvent> events,
                                         const VolSeries& vols, int lookback) {
  if (lookback < 1)
    throw std::invalid_argument("conditional_vol_comparison: lookback must be >= 1");
  VolComparison out;
  double cond = 0.0, uncond = 0.0;
  for (const auto& e : events) {
    const std::size_t lo =
        e.row > static_cast<std::size_t>(lookback) ? e.row - lookback : 0;
    for (std::size_t i = lo; i < e.row && i < vols.size(); ++i) {
      if (vols.provisional[i]) continue;
      cond += vols.sigmas[i];
      ++out.conditional_n;
    }
  }
  for (std::size_t i = 0; i < vols.size(); ++i) {
    if (vols.provisional[i]) continue;
    uncond += vols.sigmas[i];
    ++out.unconditional_n;
  }
  if (out.conditional_n == 0 || out.unconditional_n == 0)
    throw std::invalid_argument("conditional_vol_comparison: empty sample");
  out.conditional_mean = annualize(cond / static_cast<double>(out.conditional_n));
  out.unconditional_mean =
      annualize(uncond / static_cast<double>(out.unconditional_n));
  return out;
}

}  // namespace rvol
