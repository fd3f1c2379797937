#pragma once

#include <compare>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace rvol {

/// Calendar date stored as a day serial (days since 1970-01-01, proleptic
/// Gregorian). Comparable, printable as ISO-8601.
class Date {
 public:
  Date() = default;
  static Date from_serial(std::int32_t days) { return Date(days); }
  static Date from_ymd(int year, int month, int day);
  /// Strict "YYYY-MM-DD". Throws data_error on anything else.
  static Date parse(std::string_view iso);

  std::string to_string() const;
  std::int32_t serial() const { return serial_; }
  Date next_day() const { return Date(serial_ + 1); }

  friend auto operator<=>(const Date&, const Date&) = default;

 private:
  explicit Date(std::int32_t s) : serial_(s) {}
  std::int32_t serial_ = 0;
};

/// Describes a two-column CSV file: a date column and a value column.
struct CsvFormat {
  std::string date_column = "date";
  std::string value_column = "close";
  bool require_positive = true;
};

/// Daily close prices for one instrument, strictly increasing dates,
/// all prices > 0.
struct PriceSeries {
  std::string instrument_id;
  std::vector<Date> dates;
  std::vector<double> prices;

  std::size_t size() const { return prices.size(); }
  void validate() const;  // throws data_error on invariant violation
  bool operator==(const PriceSeries&) const = default;
};

/// One-step arithmetic returns; dates[i] is the later date of each pair.
struct ReturnSeries {
  std::string instrument_id;
  std::vector<Date> dates;
  std::vector<double> returns;

  std::size_t size() const { return returns.size(); }
};

/// Generic dated value series (volatility traces, external index levels).
/// No positivity requirement.
struct ValueSeries {
  std::string instrument_id;
  std::vector<Date> dates;
  std::vector<double> values;
};

/// Loads a CSV price file. Rows are sorted by date after parsing; duplicate
/// dates, malformed rows (reported with their row number) and non-positive
/// prices are rejected. Lines starting with '#' are skipped. The instrument
/// id is the file stem.
PriceSeries load_price_series(const std::filesystem::path& path,
                              const CsvFormat& format = {});

/// Writes header + rows with shortest round-trip number formatting, so
/// load(save(s)) == s bit for bit.
void save_price_series(const PriceSeries& series,
                       const std::filesystem::path& path,
                       const CsvFormat& format = {});

/// Same parsing rules as load_price_series but without the positivity
/// requirement; used for arbitrary value series.
ValueSeries load_value_series(const std::filesystem::path& path,
                              const CsvFormat& format);

ReturnSeries arithmetic_returns(const PriceSeries& series);

/// One EMA step: (1 - lambda) * prev + lambda * x. lambda must be in (0, 1].
double ema_update(double prev, double x, double lambda);

/// Values of both series restricted to their common dates, in date order.
std::pair<std::vector<double>, std::vector<double>> align_by_date(
    const ValueSeries& a, const ValueSeries& b);

}  // namespace rvol
