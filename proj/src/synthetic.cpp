#include "plf/synthetic.hpp"

#include "plf/csv_io.hpp"
#include "plf/errors.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <random>

namespace plf {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kHoursPerYear = 8766.0;

Timestamp end_of_span(Timestamp start, int years) {
  const auto ymd = start.date();
  int d = static_cast<int>(static_cast<unsigned>(ymd.day()));
  const int m = static_cast<int>(static_cast<unsigned>(ymd.month()));
  const int y = static_cast<int>(ymd.year()) + years;
  if (m == 2 && d == 29 && !is_leap_year(y)) d = 28;
  return Timestamp::from_civil(y, m, d, start.hour());
}

void validate(const SynthConfig& c) {
  if (c.years < 2) fail(Errc::invalid_config, "synthetic data needs at least 2 years");
  if (!(c.noise_scale >= 0.0)) fail(Errc::invalid_config, "noise scale must be >= 0");
  if (c.load_noise_sd < 0.0 || c.anomaly_sd < 0.0 || c.station_noise_sd < 0.0 || c.station_offset_sd < 0.0)
    fail(Errc::invalid_config, "standard deviations must be >= 0");
  if (!(std::abs(c.anomaly_ar) < 1.0)) fail(Errc::invalid_config, "anomaly AR coefficient must be in (-1, 1)");
}

}  // namespace

double synthetic_temperature_mean(const SynthConfig& c, Timestamp t, double station_offset) {
  const auto cal = calendar_stamp(t);
  const double hod = t.hour();
  return c.temp_mean + c.temp_annual_amp * std::sin(kTwoPi * (cal.day_of_year - c.temp_annual_phase_d) / 365.25) +
         c.temp_diurnal_amp * std::sin(kTwoPi * (hod - c.temp_diurnal_phase_h) / 24.0) + station_offset;
}

double synthetic_load_mean(const SynthConfig& c, Timestamp t, double mean_temp) {
  const auto cal = calendar_stamp(t);
  const double hod = t.hour();
  const double elapsed = static_cast<double>(t - c.start);
  const double daily = c.load_daily_amp * std::sin(kTwoPi * (hod - c.load_daily_phase_h) / 24.0) +
                       c.load_daily2_amp * std::sin(2.0 * kTwoPi * (hod - c.load_daily_phase_h) / 24.0);
  const double weekly = c.load_weekly_amp * std::sin(kTwoPi * (cal.period_of_week - 1) / 168.0);
  const double annual = c.load_annual_amp * std::sin(kTwoPi * (cal.day_of_year - c.load_annual_phase_d) / 365.25);
  const double weather = c.heat_slope * std::max(0.0, c.heat_base - mean_temp) +
                         c.cool_slope * std::max(0.0, mean_temp - c.cool_base);
  return c.load_base + c.load_trend_per_year * elapsed / kHoursPerYear + daily + weekly + annual + weather;
}

SynthData generate_synthetic(const SynthConfig& c, std::uint64_t seed) {
  validate(c);
  const auto hours = static_cast<std::size_t>(end_of_span(c.start, c.years) - c.start);

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);

  std::vector<double> offsets(kStationCount);
  for (double& o : offsets) o = c.station_offset_sd * normal(rng);

  const double anomaly_sd = c.noise_scale * c.anomaly_sd;
  const double station_sd = c.noise_scale * c.station_noise_sd;
  const double load_sd = c.noise_scale * c.load_noise_sd;

  std::vector<std::vector<double>> stations(kStationCount, std::vector<double>(hours));
  std::vector<double> load(hours);
  double anomaly = anomaly_sd * normal(rng) / std::sqrt(1.0 - c.anomaly_ar * c.anomaly_ar);
  for (std::size_t i = 0; i < hours; ++i) {
    const auto t = c.start + static_cast<std::int64_t>(i);
    if (i > 0) anomaly = c.anomaly_ar * anomaly + anomaly_sd * normal(rng);
    double mean = 0.0;
    for (std::size_t s = 0; s < kStationCount; ++s) {
      const double v = synthetic_temperature_mean(c, t, offsets[s]) + anomaly + station_sd * normal(rng);
      stations[s][i] = v;
      mean += v;
    }
    mean /= static_cast<double>(kStationCount);
    load[i] = synthetic_load_mean(c, t, mean) + load_sd * normal(rng);
  }

  return SynthData{HourlySeries(c.start, std::move(load), Unit::load), StationTable(c.start, std::move(stations)),
                   std::move(offsets), seed};
}

std::vector<std::pair<std::string, std::string>> synthetic_metadata(const SynthConfig& c, const SynthData& data) {
  std::vector<std::pair<std::string, std::string>> kv;
  const auto put = [&](std::string key, double v) { kv.emplace_back(std::move(key), format_double(v)); };
  kv.emplace_back("seed", std::to_string(data.seed));
  kv.emplace_back("start", c.start.iso());
  kv.emplace_back("years", std::to_string(c.years));
  kv.emplace_back("rows", std::to_string(data.load.size()));
  put("noise_scale", c.noise_scale);
  put("load_base", c.load_base);
  put("load_trend_per_year", c.load_trend_per_year);
  put("load_daily_amp", c.load_daily_amp);
  put("load_daily_phase_h", c.load_daily_phase_h);
  put("load_daily2_amp", c.load_daily2_amp);
  put("load_weekly_amp", c.load_weekly_amp);
  put("load_annual_amp", c.load_annual_amp);
  put("load_annual_phase_d", c.load_annual_phase_d);
  put("heat_slope", c.heat_slope);
  put("heat_base", c.heat_base);
  put("cool_slope", c.cool_slope);
  put("cool_base", c.cool_base);
  put("load_noise_sd", c.load_noise_sd);
  put("temp_mean", c.temp_mean);
  put("temp_annual_amp", c.temp_annual_amp);
  put("temp_annual_phase_d", c.temp_annual_phase_d);
  put("temp_diurnal_amp", c.temp_diurnal_amp);
  put("temp_diurnal_phase_h", c.temp_diurnal_phase_h);
  put("station_offset_sd", c.station_offset_sd);
  put("anomaly_ar", c.anomaly_ar);
  put("anomaly_sd", c.anomaly_sd);
  put("station_noise_sd", c.station_noise_sd);
  kv.emplace_back("load_formula",
                  "base+trend*t/8766+daily_amp*sin(2pi(h-phase)/24)+daily2_amp*sin(4pi(h-phase)/24)"
                  "+weekly_amp*sin(2pi(w-1)/168)+annual_amp*sin(2pi(doy-phase)/365.25)"
                  "+heat_slope*max(0,heat_base-T)+cool_slope*max(0,T-cool_base)+N(0,(noise_scale*load_noise_sd)^2)");
  kv.emplace_back("temp_formula",
                  "mean+annual_amp*sin(2pi(doy-phase)/365.25)+diurnal_amp*sin(2pi(h-phase)/24)+offset_s"
                  "+AR1(anomaly_ar,noise_scale*anomaly_sd)+N(0,(noise_scale*station_noise_sd)^2)");
  for (std::size_t s = 0; s < data.station_offsets.size(); ++s)
    put("offset_w" + std::to_string(s + 1), data.station_offsets[s]);
  return kv;
}

void write_metadata(const std::filesystem::path& path, const std::vector<std::pair<std::string, std::string>>& kv) {
  std::ofstream out(path);
  if (!out) fail(Errc::io_error, "cannot write " + path.string());
  for (const auto& [k, v] : kv) out << k << '=' << v << '\n';
  if (!out) fail(Errc::io_error, "write failed for " + path.string());
}

}  // namespace plf
