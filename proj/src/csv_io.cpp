#include "plf/csv_io.hpp"

#include "plf/errors.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <string>
#include <string_view>

namespace plf {

namespace {

constexpr double kMissing = std::numeric_limits<double>::quiet_NaN();

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (true) {
    const auto comma = line.find(',', pos);
    out.push_back(trim(line.substr(pos, comma == std::string_view::npos ? std::string_view::npos : comma - pos)));
    if (comma == std::string_view::npos) break;
    pos = comma + 1;
  }
  return out;
}

double parse_cell(std::string_view cell, std::size_t line_no) {
  if (cell.empty()) return kMissing;
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
  if (ec != std::errc() || ptr != cell.data() + cell.size() || !std::isfinite(v))
    fail(Errc::malformed_row, "line " + std::to_string(line_no) + ": bad number '" + std::string(cell) + "'");
  return v;
}

struct RawTable {
  Timestamp start;
  std::vector<std::vector<double>> columns;  // on the full hourly grid, NaN = missing
};

/// Reads `timestamp,v1..vN` rows onto a contiguous grid.
RawTable read_rows(const std::filesystem::path& path, std::size_t value_columns) {
  std::ifstream in(path);
  if (!in) fail(Errc::io_error, "cannot open " + path.string());

  RawTable table;
  table.columns.resize(value_columns);
  std::optional<Timestamp> last;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto text = trim(line);
    if (text.empty()) continue;
    const auto cells = split(text);
    if (!last && cells.front().starts_with("timestamp")) {
      if (cells.size() != value_columns + 1)
        fail(Errc::wrong_column_count, "header has " + std::to_string(cells.size()) + " columns");
      continue;
    }
    if (cells.size() != value_columns + 1)
      fail(value_columns > 1 ? Errc::wrong_column_count : Errc::malformed_row,
           "line " + std::to_string(line_no) + ": expected " + std::to_string(value_columns + 1) + " columns, got " +
               std::to_string(cells.size()));
    const auto t = Timestamp::parse(cells.front());
    if (!last) {
      table.start = t;
    } else {
      if (t <= *last) fail(Errc::malformed_row, "line " + std::to_string(line_no) + ": timestamps not ascending");
      const auto missing = (t - *last) - 1;
      if (missing > kMaxGapHours)
        fail(Errc::gap_too_large, std::to_string(missing) + " missing hours before " + t.iso());
      for (auto& col : table.columns) col.insert(col.end(), static_cast<std::size_t>(missing), kMissing);
    }
    for (std::size_t c = 0; c < value_columns; ++c) table.columns[c].push_back(parse_cell(cells[c + 1], line_no));
    last = t;
  }
  if (!last) fail(Errc::empty_file, path.string() + " has no data rows");
  return table;
}

/// Linear interpolation across runs of at most kMaxGapHours missing values.
void repair_gaps(std::vector<double>& v, const RawTable& table) {
  std::size_t i = 0;
  while (i < v.size()) {
    if (!std::isnan(v[i])) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < v.size() && std::isnan(v[j])) ++j;
    const auto at = (table.start + static_cast<std::int64_t>(i)).iso();
    if (i == 0 || j == v.size()) fail(Errc::malformed_row, "missing value at series boundary near " + at);
    if (j - i > static_cast<std::size_t>(kMaxGapHours))
      fail(Errc::gap_too_large, std::to_string(j - i) + " missing hours from " + at);
    const double a = v[i - 1], b = v[j];
    const double span = static_cast<double>(j - i + 1);
    for (std::size_t k = i; k < j; ++k) v[k] = a + (b - a) * static_cast<double>(k - i + 1) / span;
    i = j;
  }
}

}  // namespace

std::string format_double(double value) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, ptr);
}

HourlySeries ingest_load_csv(const std::filesystem::path& path) {
  auto raw = read_rows(path, 1);
  repair_gaps(raw.columns.front(), raw);
  return HourlySeries(raw.start, std::move(raw.columns.front()), Unit::load);
}

StationTable ingest_temperature_csv(const std::filesystem::path& path) {
  auto raw = read_rows(path, kStationCount);
  for (auto& col : raw.columns) repair_gaps(col, raw);
  return StationTable(raw.start, std::move(raw.columns));
}

void write_load_csv(const std::filesystem::path& path, const HourlySeries& series) {
  std::ofstream out(path);
  if (!out) fail(Errc::io_error, "cannot write " + path.string());
  out << "timestamp," << (series.unit() == Unit::load ? "load" : "temperature") << '\n';
  for (std::size_t i = 0; i < series.size(); ++i) out << series.time_at(i).iso() << ',' << format_double(series[i]) << '\n';
  if (!out) fail(Errc::io_error, "write failed for " + path.string());
}

void write_temperature_csv(const std::filesystem::path& path, const StationTable& table) {
  std::ofstream out(path);
  if (!out) fail(Errc::io_error, "cannot write " + path.string());
  out << "timestamp";
  for (std::size_t s = 0; s < table.station_count(); ++s) out << ",w" << s + 1;
  out << '\n';
  for (std::size_t i = 0; i < table.size(); ++i) {
    out << (table.start() + static_cast<std::int64_t>(i)).iso();
    for (std::size_t s = 0; s < table.station_count(); ++s) out << ',' << format_double(table.station(s)[i]);
    out << '\n';
  }
  if (!out) fail(Errc::io_error, "write failed for " + path.string());
}

}  // namespace plf
