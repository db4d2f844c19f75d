#include "plf/series.hpp"

#include "plf/errors.hpp"

#include <cmath>
#include <string>

namespace plf {

HourlySeries::HourlySeries(Timestamp start, std::vector<double> values, Unit unit)
    : start_(start), values_(std::move(values)), unit_(unit) {
  if (values_.empty()) fail(Errc::invalid_config, "hourly series must not be empty");
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (!std::isfinite(values_[i])) fail(Errc::invalid_config, "non-finite value at index " + std::to_string(i));
  }
}

std::optional<std::size_t> HourlySeries::index_of(Timestamp t) const noexcept {
  if (t < start_ || t >= end()) return std::nullopt;
  return static_cast<std::size_t>(t - start_);
}

HourlySeries HourlySeries::slice(Timestamp from, Timestamp to) const {
  if (!covers(from, to)) fail(Errc::index_out_of_range, "slice [" + from.iso() + ", " + to.iso() + ") not covered");
  const auto first = values_.begin() + (from - start_);
  return HourlySeries(from, std::vector<double>(first, first + (to - from)), unit_);
}

HourlySeries HourlySeries::before(Timestamp t) const {
  if (t <= start_) fail(Errc::empty_history, "no observations before " + t.iso());
  if (t >= end()) return *this;
  return slice(start_, t);
}

CalendarStamp stamp(const HourlySeries& series, std::size_t index) {
  if (index >= series.size())
    fail(Errc::index_out_of_range, "index " + std::to_string(index) + " >= " + std::to_string(series.size()));
  return calendar_stamp(series.time_at(index));
}

StationTable::StationTable(Timestamp start, std::vector<std::vector<double>> stations)
    : start_(start), stations_(std::move(stations)) {
  if (stations_.size() != kStationCount)
    fail(Errc::wrong_column_count, "expected " + std::to_string(kStationCount) + " stations, got " +
                                       std::to_string(stations_.size()));
  const auto n = stations_.front().size();
  if (n == 0) fail(Errc::invalid_config, "station table must not be empty");
  for (const auto& s : stations_) {
    if (s.size() != n) fail(Errc::invalid_config, "station sequences differ in length");
    for (double v : s)
      if (!std::isfinite(v)) fail(Errc::invalid_config, "non-finite station temperature");
  }
}

HourlySeries mean_temperature(const StationTable& table) {
  std::vector<double> mean(table.size(), 0.0);
  for (std::size_t s = 0; s < table.station_count(); ++s) {
    const auto col = table.station(s);
    for (std::size_t i = 0; i < mean.size(); ++i) mean[i] += col[i];
  }
  for (double& m : mean) m /= static_cast<double>(table.station_count());
  return HourlySeries(table.start(), std::move(mean), Unit::temperature);
}

}  // namespace plf
