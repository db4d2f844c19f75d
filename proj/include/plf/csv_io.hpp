#pragma once

#include "plf/series.hpp"

#include <filesystem>

namespace plf {

/// Gaps of up to this many consecutive missing hours are linearly interpolated.
inline constexpr int kMaxGapHours = 6;

/// Reads `timestamp,load` rows (header optional). Empty value cells and
/// missing hours count as gaps.
HourlySeries ingest_load_csv(const std::filesystem::path& path);

/// Reads `timestamp,w1,...,w25` rows; the gap policy applies per station.
StationTable ingest_temperature_csv(const std::filesystem::path& path);

void write_load_csv(const std::filesystem::path& path, const HourlySeries& series);
void write_temperature_csv(const std::filesystem::path& path, const StationTable& table);

/// Shortest decimal text that parses back to exactly `value`.
std::string format_double(double value);

}  // namespace plf
