#pragma once

#include "plf/calendar.hpp"

#include <array>
#include <cstddef>
#include <filesystem>
#include <span>
#include <vector>

namespace plf {

inline constexpr std::size_t kQuantileCount = 99;

/// 0.01, 0.02, ..., 0.99
const std::array<double, kQuantileCount>& quantile_levels() noexcept;

/// Pinball loss rho_q(z) = |z (q - 1{z < 0})|.
inline double pinball_loss_term(double q, double residual) noexcept {
  return residual >= 0.0 ? q * residual : (q - 1.0) * residual;
}

/// 99 quantile trajectories over consecutive hours starting at `start`.
class QuantileForecast {
public:
  QuantileForecast() = default;
  QuantileForecast(Timestamp start, std::size_t hours);
  QuantileForecast(Timestamp start, std::vector<double> row_major_values);

  Timestamp start() const noexcept { return start_; }
  std::size_t hours() const noexcept { return values_.size() / kQuantileCount; }
  Timestamp time_at(std::size_t hour) const noexcept { return start_ + static_cast<std::int64_t>(hour); }

  std::span<const double> row(std::size_t hour) const noexcept {
    return {values_.data() + hour * kQuantileCount, kQuantileCount};
  }
  std::span<double> row(std::size_t hour) noexcept {
    return {values_.data() + hour * kQuantileCount, kQuantileCount};
  }
  double at(std::size_t hour, std::size_t k) const noexcept { return values_[hour * kQuantileCount + k]; }
  std::span<const double> values() const noexcept { return values_; }

  bool operator==(const QuantileForecast&) const = default;

private:
  Timestamp start_;
  std::vector<double> values_;
};

/// Sorts every row ascending.
QuantileForecast repair_crossing(QuantileForecast forecast);

bool rows_nondecreasing(const QuantileForecast& forecast) noexcept;

/// `timestamp,q01,...,q99`, one row per horizon hour.
void write_quantile_csv(const std::filesystem::path& path, const QuantileForecast& forecast);
QuantileForecast read_quantile_csv(const std::filesystem::path& path);

}  // namespace plf
