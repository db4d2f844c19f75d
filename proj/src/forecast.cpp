#include "plf/forecast.hpp"

#include "plf/csv_io.hpp"
#include "plf/errors.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>

namespace plf {

const std::array<double, kQuantileCount>& quantile_levels() noexcept {
  static const auto levels = [] {
    std::array<double, kQuantileCount> q{};
    for (std::size_t k = 0; k < kQuantileCount; ++k) q[k] = static_cast<double>(k + 1) / 100.0;
    return q;
  }();
  return levels;
}

QuantileForecast::QuantileForecast(Timestamp start, std::size_t hours)
    : start_(start), values_(hours * kQuantileCount, 0.0) {}

QuantileForecast::QuantileForecast(Timestamp start, std::vector<double> row_major_values)
    : start_(start), values_(std::move(row_major_values)) {
  if (values_.size() % kQuantileCount != 0)
    fail(Errc::invalid_config, "quantile forecast needs 99 values per hour, got " + std::to_string(values_.size()));
}

QuantileForecast repair_crossing(QuantileForecast forecast) {
  for (std::size_t h = 0; h < forecast.hours(); ++h) {
    auto row = forecast.row(h);
    std::sort(row.begin(), row.end());
  }
  return forecast;
}

bool rows_nondecreasing(const QuantileForecast& forecast) noexcept {
  for (std::size_t h = 0; h < forecast.hours(); ++h) {
    const auto row = forecast.row(h);
    if (!std::is_sorted(row.begin(), row.end())) return false;
  }
  return true;
}

void write_quantile_csv(const std::filesystem::path& path, const QuantileForecast& forecast) {
  std::ofstream out(path);
  if (!out) fail(Errc::io_error, "cannot write " + path.string());
  out << "timestamp";
  for (std::size_t k = 1; k <= kQuantileCount; ++k) out << (k < 10 ? ",q0" : ",q") << k;
  out << '\n';
  for (std::size_t h = 0; h < forecast.hours(); ++h) {
    out << forecast.time_at(h).iso();
    for (double v : forecast.row(h)) out << ',' << format_double(v);
    out << '\n';
  }
  if (!out) fail(Errc::io_error, "write failed for " + path.string());
}

QuantileForecast read_quantile_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(Errc::io_error, "cannot open " + path.string());
  std::string line;
  std::optional<Timestamp> start;
  std::vector<double> values;
  std::size_t line_no = 0, rows = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.starts_with("timestamp")) continue;
    std::stringstream cells(line);
    std::string cell;
    std::getline(cells, cell, ',');
    const auto t = Timestamp::parse(cell);
    if (!start) start = t;
    if (t != *start + static_cast<std::int64_t>(rows))
      fail(Errc::malformed_row, "line " + std::to_string(line_no) + ": forecast hours must be consecutive");
    std::size_t count = 0;
    while (std::getline(cells, cell, ',')) {
      double v = 0.0;
      const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
      if (ec != std::errc() || ptr != cell.data() + cell.size() || !std::isfinite(v))
        fail(Errc::malformed_row, "line " + std::to_string(line_no) + ": bad number '" + cell + "'");
      values.push_back(v);
      ++count;
    }
    if (count != kQuantileCount)
      fail(Errc::wrong_column_count, "line " + std::to_string(line_no) + ": expected 99 quantiles");
    ++rows;
  }
  if (!start) fail(Errc::empty_file, path.string() + " holds no forecast rows");
  return QuantileForecast(*start, std::move(values));
}

}  // namespace plf
