#pragma once

#include "plf/series.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

namespace plf {

/// Generator coefficients. Load is
///   base + trend*t/8760 + daily + weekly + annual sinusoids
///   + heating*max(0, heat_base - T) + cooling*max(0, T - cool_base) + noise
/// with T the mean station temperature; t in hours since `start`.
struct SynthConfig {
  Timestamp start = Timestamp::from_civil(2005, 1, 1);
  int years = 4;
  double noise_scale = 1.0;  // multiplies every noise term below

  double load_base = 150.0;
  double load_trend_per_year = 3.0;
  double load_daily_amp = 25.0;
  double load_daily_phase_h = 9.0;
  double load_daily2_amp = 8.0;
  double load_weekly_amp = 8.0;
  double load_annual_amp = 6.0;
  double load_annual_phase_d = 20.0;
  double heat_slope = 1.6;
  double heat_base = 55.0;
  double cool_slope = 2.4;
  double cool_base = 68.0;
  double load_noise_sd = 4.0;

  double temp_mean = 58.0;
  double temp_annual_amp = 20.0;
  double temp_annual_phase_d = 110.0;
  double temp_diurnal_amp = 7.0;
  double temp_diurnal_phase_h = 9.0;
  double station_offset_sd = 2.0;
  double anomaly_ar = 0.995;
  double anomaly_sd = 0.6;  // innovation sd of the shared AR(1) weather anomaly
  double station_noise_sd = 1.0;
};

struct SynthData {
  HourlySeries load;
  StationTable temps;
  std::vector<double> station_offsets;
  std::uint64_t seed;
};

/// Deterministic in (config, seed). Throws invalid_config.
SynthData generate_synthetic(const SynthConfig& config, std::uint64_t seed);

/// Noise-free load at hour `t` given the mean temperature at that hour.
double synthetic_load_mean(const SynthConfig& config, Timestamp t, double mean_temp);
/// Noise-free temperature of a station with the given offset.
double synthetic_temperature_mean(const SynthConfig& config, Timestamp t, double station_offset);

/// Every coefficient plus the seed and station offsets as ordered key/value pairs.
std::vector<std::pair<std::string, std::string>> synthetic_metadata(const SynthConfig& config,
                                                                    const SynthData& data);
void write_metadata(const std::filesystem::path& path,
                    const std::vector<std::pair<std::string, std::string>>& entries);

}  // namespace plf
