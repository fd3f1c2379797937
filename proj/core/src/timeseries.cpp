#include "rvol/timeseries.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>

#include "rvol/errors.hpp"

namespace rvol {
namespace {

// Proleptic Gregorian day arithmetic (Howard Hinnant's civil algorithms).
std::int32_t days_from_civil(int y, int m, int d) {
  y -= m <= 2;
  const int era = (y >= 0 ? y : y - 399) / 400;
  const unsigned yoe = static_cast<unsigned>(y - era * 400);
  const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
  const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return era * 146097 + static_cast<int>(doe) - 719468;
}

void civil_from_days(std::int32_t z, int& y, int& m, int& d) {
  z += 719468;
  const int era = (z >= 0 ? z : z - 146096) / 146097;
  const unsigned doe = static_cast<unsigned>(z - era * 146097);
  const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
  y = static_cast<int>(yoe) + era * 400;
  const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
  const unsigned mp = (5 * doy + 2) / 153;
  d = static_cast<int>(doy - (153 * mp + 2) / 5 + 1);
  m = static_cast<int>(mp + (mp < 10 ? 3 : -9));
  y += m <= 2;
}

bool days_in_month_ok(int y, int m, int d) {
  static constexpr int lengths[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
  if (m < 1 || m > 12 || d < 1) return false;
  int len = lengths[m - 1];
  const bool leap = (y % 4 == 0 && y % 100 != 0) || y % 400 == 0;
  if (m == 2 && leap) len = 29;
  return d <= len;
}

int parse_int_field(std::string_view s) {
  int v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size()) return -1;
  return v;
}

double parse_double_field(std::string_view s, bool& ok) {
  double v = 0.0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  ok = ec == std::errc() && p == s.data() + s.size();
  return v;
}

std::string format_double(double v) {
  char buf[32];
  auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, p);
}

void strip_cr(std::string& line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
}

struct RawRow {
  Date date;
  double value;
};

std::vector<RawRow> read_rows(const std::filesystem::path& path,
                              const CsvFormat& format) {
  std::ifstream in(path);
  if (!in) throw io_error("cannot open " + path.string());

  std::string line;
  std::size_t row_no = 0;
  bool header_seen = false;
  const std::string expected_header =
      format.date_column + "," + format.value_column;
  std::vector<RawRow> rows;

  while (std::getline(in, line)) {
    ++row_no;
    strip_cr(line);
    if (row_no == 1 && line.size() >= 3 && line[0] == '\xEF' &&
        line[1] == '\xBB' && line[2] == '\xBF') {
      line.erase(0, 3);  // UTF-8 BOM
    }
    if (line.empty() || line[0] == '#') continue;
    if (!header_seen) {
      if (line != expected_header)
        throw data_error(path.string() + ": expected header '" +
                         expected_header + "', got '" + line + "'");
      header_seen = true;
      continue;
    }
    const auto comma = line.find(',');
    if (comma == std::string::npos || line.find(',', comma + 1) != std::string::npos)
      throw data_error(path.string() + ": malformed row " + std::to_string(row_no));
    RawRow r;
    try {
      r.date = Date::parse(std::string_view(line).substr(0, comma));
    } catch (const data_error&) {
      throw data_error(path.string() + ": bad date at row " + std::to_string(row_no));
    }
    bool ok = false;
    r.value = parse_double_field(std::string_view(line).substr(comma + 1), ok);
    if (!ok || !std::isfinite(r.value))
      throw data_error(path.string() + ": bad value at row " + std::to_string(row_no));
    if (format.require_positive && r.value <= 0.0)
      throw data_error(path.string() + ": non-positive price at row " +
                       std::to_string(row_no));
    rows.push_back(r);
  }
  if (!header_seen) throw data_error(path.string() + ": empty file");

  std::stable_sort(rows.begin(), rows.end(),
                   [](const RawRow& a, const RawRow& b) { return a.date < b.date; });
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (rows[i].date == rows[i - 1].date)
      throw data_error(path.string() + ": duplicate date " + rows[i].date.to_string());
  }
  return rows;
}

}  // namespace

Date Date::from_ymd(int year, int month, int day) {
  if (!days_in_month_ok(year, month, day))
    throw data_error("invalid calendar date");
  return Date(days_from_civil(year, month, day));
}

Date Date::parse(std::string_view iso) {
  if (iso.size() != 10 || iso[4] != '-' || iso[7] != '-')
    throw data_error("date not in YYYY-MM-DD form");
  const int y = parse_int_field(iso.substr(0, 4));
  const int m = parse_int_field(iso.substr(5, 2));
  const int d = parse_int_field(iso.substr(8, 2));
  if (y < 0 || m < 0 || d < 0 || !days_in_month_ok(y, m, d))
    throw data_error("date not in YYYY-MM-DD form");
  return Date(days_from_civil(y, m, d));
}

std::string Date::to_string() const {
  int y, m, d;
  civil_from_days(serial_, y, m, d);
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%04d-%02d-%02d", y, m, d);
  return buf;
}

void PriceSeries::validate() const {
  if (dates.size() != prices.size())
    throw data_error(instrument_id + ": dates/prices length mismatch");
  for (std::size_t i = 0; i < prices.size(); ++i) {
    if (!(prices[i] > 0.0) || !std::isfinite(prices[i]))
      throw data_error(instrument_id + ": non-positive price");
    if (i > 0 && !(dates[i - 1] < dates[i]))
      throw data_error(instrument_id + ": dates not strictly increasing");
  }
}

PriceSeries load_price_series(const std::filesystem::path& path,
                              const CsvFormat& format) {
  CsvFormat fmt = format;
  fmt.require_positive = true;
  const auto rows = read_rows(path, fmt);
  PriceSeries s;
  s.instrument_id = path.stem().string();
  s.dates.reserve(rows.size());
  s.prices.reserve(rows.size());
  for (const auto& r : rows) {
    s.dates.push_back(r.date);
    s.prices.push_back(r.value);
  }
  s.validate();
  return s;
}

ValueSeries load_value_series(const std::filesystem::path& path,
                              const CsvFormat& format) {
  const auto rows = read_rows(path, format);
  ValueSeries s;
  s.instrument_id = path.stem().string();
  s.dates.reserve(rows.size());
  s.values.reserve(rows.size());
  for (const auto& r : rows) {
    s.dates.push_back(r.date);
    s.values.push_back(r.value);
  }
  return s;
}

void save_price_series(const PriceSeries& series,
                       const std::filesystem::path& path,
                       const CsvFormat& format) {
  series.validate();
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw io_error("cannot write " + path.string());
  out << format.date_column << ',' << format.value_column << '\n';
  for (std::size_t i = 0; i < series.size(); ++i)
    out << series.dates[i].to_string() << ',' << format_double(series.prices[i])
        << '\n';
  if (!out) throw io_error("write failed for " + path.string());
}

ReturnSeries arithmetic_returns(const PriceSeries& series) {
  series.validate();
  if (series.size() < 2)
    throw data_error(series.instrument_id + ": need at least 2 prices");
  ReturnSeries r;
  r.instrument_id = series.instrument_id;
  r.dates.assign(series.dates.begin() + 1, series.dates.end());
  r.returns.reserve(series.size() - 1);
  for (std::size_t i = 1; i < series.size(); ++i) {
    const double ret = (series.prices[i] - series.prices[i - 1]) / series.prices[i - 1];
    if (!(ret > -1.0))
      throw data_error(series.instrument_id + ": return <= -1 at " +
                       series.dates[i].to_string());
    r.returns.push_back(ret);
  }
  return r;
}

double ema_update(double prev, double x, double lambda) {
  if (!(lambda > 0.0) || lambda > 1.0)
    throw std::invalid_argument("ema_update: lambda outside (0, 1]");
  return (1.0 - lambda) * prev + lambda * x;
}

std::pair<std::vector<double>, std::vector<double>> align_by_date(
    const ValueSeries& a, const ValueSeries& b) {
  std::pair<std::vector<double>, std::vector<double>> out;
  std::size_t i = 0, j = 0;
  while (i < a.dates.size() && j < b.dates.size()) {
    if (a.dates[i] < b.dates[j]) {
      ++i;
    } else if (b.dates[j] < a.dates[i]) {
      ++j;
    } else {
      out.first.push_back(a.values[i]);
      out.second.push_back(b.values[j]);
      ++i;
      ++j;
    }
  }
  return out;
}

}  // namespace rvol
