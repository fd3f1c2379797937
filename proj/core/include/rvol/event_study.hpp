#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "rvol/reactive.hpp"
#include "rvol/timeseries.hpp"

namespace rvol {

/// Event groups: systematic when the same-day index move is extreme,
/// specific otherwise; sign of the normalized event return.
enum class EventGroup {
  kSystematicPositive,
  kSystematicNegative,
  kSpecificPositive,
  kSpecificNegative,
};
std::string_view to_string(EventGroup g);

/// A vol-normalized extreme return with its +-delta day window.
/// window[k + delta] = R(t + k) / sigma(t + k - 1); r0 = window[delta].
struct ExtremeEvent {
  std::string instrument_id;
  Date date;
  std::size_t row = 0;  // index of r0's return in the source series
  int delta = 0;
  double normalized_return = 0.0;
  std::vector<double> window;
  std::optional<EventGroup> group;
};

/// Scans for |R(t)| > threshold_mult * sigma(t-1). De-dup: a retained
/// crossing blocks further crossings for the next delta rows, even if it is
/// itself later dropped. Dropped events: window truncated by a series edge,
/// or any sigma in the window provisional. The vol series must cover exactly
/// the return dates (data_error otherwise).
std::vector<ExtremeEvent> detect_events(const ReturnSeries& returns,
                                        const VolSeries& vols, int delta = 9,
                                        double threshold_mult = 3.0);

/// Systematic when |index return on the event date| > index_threshold
/// (strict). Throws data_error when the index has no return for that date.
EventGroup classify_event(const ExtremeEvent& event,
                          const ReturnSeries& index_returns,
                          double index_threshold = 0.03);

/// q[k + delta] = sqrt(mean of window[k + delta]^2 over events) - 1.
/// mean_before / mean_after average q over k = -delta..-1 and 1..delta
/// (k = 0 reported but excluded).
struct QProfile {
  std::string label;
  int delta = 0;
  std::vector<double> q;
  std::vector<long> counts;
  double mean_before = 0.0;
  double mean_after = 0.0;
  bool with_replacement = false;  // set by random_baseline when it resamples
};

/// Profile over the events of one group. Throws std::invalid_argument when
/// the group is empty or window sizes disagree.
QProfile q_profile(std::span<const ExtremeEvent> events, EventGroup group);

/// Profile over all given events regardless of group.
QProfile q_profile_pooled(std::span<const ExtremeEvent> events,
                          std::string label);

/// Count-weighted combination at the mean-square level; exact because
/// (q + 1)^2 recovers the group mean of squared normalized returns.
QProfile merge_q_profiles(std::span<const QProfile> profiles,
                          std::string label);

/// Decay time of the post-event relaxation: least squares of log q_k on
/// (k - 1) over the positive q_k among k = 1..delta. Throws
/// std::invalid_argument with fewer than 3 positive points or a
/// non-decaying profile.
double recovery_time(const QProfile& profile);

struct TailFit {
  std::string group;
  double alpha = 0.0;
  double threshold = 0.0;
  std::size_t n_tail = 0;
  /// True when the estimate grows materially as the threshold moves to the
  /// tail median, the signature of a non-power-law tail.
  bool diverging = false;
};

/// Hill estimator on |samples| >= threshold:
/// alpha = n_tail / sum(log(|x| / threshold)). Requires >= 50 tail samples
/// (std::invalid_argument otherwise).
TailFit tail_exponent(std::span<const double> normalized_returns,
                      std::string_view group, double threshold = 3.0);

struct WarningStats {
  double missed_fraction = 0.0;  // events with no warning in the prior window
  double false_fraction = 0.0;   // warnings with no event in the next window
  double multiplier = 0.0;
  int lookback = 0;
  std::size_t n_events = 0;
  std::size_t n_warnings = 0;
  std::size_t n_missed = 0;
  std::size_t n_false = 0;
};

/// A warning fires at row t when the RMS of returns over rows
/// t-lookback+1..t exceeds multiplier * sigma(t-lookback). An event counts
/// as warned when any of the lookback rows before it fired.
WarningStats warning_signal_stats(const ReturnSeries& returns,
                                  const VolSeries& vols,
                                  std::span<const ExtremeEvent> events,
                                  double multiplier = 2.0, int lookback = 9);

/// Windows at uniformly random admissible rows, no threshold, no de-dup;
/// the null profile for q_profile. Samples with replacement (and flags it)
/// when n_samples exceeds the admissible row count.
QProfile random_baseline(const ReturnSeries& returns, const VolSeries& vols,
                         std::size_t n_samples, std::uint64_t seed,
                         int delta = 9);

struct VolComparison {
  double conditional_mean = 0.0;    // annualized, prior-window average
  double unconditional_mean = 0.0;  // annualized, whole-trace average
  std::size_t conditional_n = 0;
  std::size_t unconditional_n = 0;
};

/// Mean predicted vol over the lookback rows before each event versus the
/// whole series, both annualized. Provisional entries are excluded.
VolComparison conditional_vol_comparison(std::span<const ExtremeEvent> events,
                                         const VolSeries& vols,
                                         int lookback = 9);

}  // namespace rvol
