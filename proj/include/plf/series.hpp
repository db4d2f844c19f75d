#pragma once

#include "plf/calendar.hpp"

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace plf {

enum class Unit { load, temperature };

/// Contiguous hourly observations starting at `start`. Immutable once built.
class HourlySeries {
public:
  /// Throws invalid_config on an empty or non-finite sequence.
  HourlySeries(Timestamp start, std::vector<double> values, Unit unit);

  Timestamp start() const noexcept { return start_; }
  /// One past the last observation.
  Timestamp end() const noexcept { return start_ + static_cast<std::int64_t>(values_.size()); }
  std::size_t size() const noexcept { return values_.size(); }
  Unit unit() const noexcept { return unit_; }
  std::span<const double> values() const noexcept { return values_; }
  double operator[](std::size_t i) const noexcept { return values_[i]; }

  Timestamp time_at(std::size_t i) const noexcept { return start_ + static_cast<std::int64_t>(i); }
  std::optional<std::size_t> index_of(Timestamp t) const noexcept;
  bool covers(Timestamp from, Timestamp to) const noexcept { return from >= start_ && to <= end() && from < to; }

  /// Observations in [from, to); throws index_out_of_range unless covered.
  HourlySeries slice(Timestamp from, Timestamp to) const;
  /// Observations strictly before `t`; throws empty_history if there are none.
  HourlySeries before(Timestamp t) const;

private:
  Timestamp start_;
  std::vector<double> values_;
  Unit unit_;
};

CalendarStamp stamp(const HourlySeries& series, std::size_t index);

inline constexpr std::size_t kStationCount = 25;

/// Aligned hourly temperatures from the weather stations.
class StationTable {
public:
  StationTable(Timestamp start, std::vector<std::vector<double>> stations);

  Timestamp start() const noexcept { return start_; }
  std::size_t size() const noexcept { return stations_.front().size(); }
  std::size_t station_count() const noexcept { return stations_.size(); }
  std::span<const double> station(std::size_t s) const { return stations_.at(s); }

private:
  Timestamp start_;
  std::vector<std::vector<double>> stations_;
};

/// Per-hour arithmetic mean over all stations.
HourlySeries mean_temperature(const StationTable& table);

}  // namespace plf
