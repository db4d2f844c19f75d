#pragma once

#include "plf/calendar.hpp"
#include "plf/series.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <span>
#include <vector>

namespace plf::temperature {

/// Structure of the autoregressive Fourier model
///   T_j = b0 + b1 j + sum_p (g_p sin(2 pi p d(j)/24) + d_p cos(2 pi p d(j)/24))
///       + sum_m psi_m sin(2 pi m (j/24 + phi)/365) + sum_k a_k T_{j-k}
/// with d(j) = j mod 24 and j counted in hours from `anchor`.
struct ModelSpec {
  int daily_harmonics = 4;
  int annual_harmonics = 3;
  double annual_phase_days = -85.0;
  int lags = 25;
  Timestamp anchor = Timestamp::from_civil(2005, 1, 1);

  std::size_t deterministic_length() const noexcept {
    return 2 + 2 * static_cast<std::size_t>(daily_harmonics) + static_cast<std::size_t>(annual_harmonics);
  }
  std::size_t row_length() const noexcept { return deterministic_length() + static_cast<std::size_t>(lags); }
};

struct TemperatureModelParams {
  ModelSpec spec;
  double beta0 = 0.0;
  double beta1 = 0.0;
  std::vector<double> gamma;  // diurnal sine
  std::vector<double> delta;  // diurnal cosine
  std::vector<double> psi;    // annual sine
  std::vector<double> alpha;  // lags 1..L

  /// Coefficients in design-column order.
  Eigen::VectorXd coefficients() const;
  static TemperatureModelParams from_coefficients(const ModelSpec& spec, const Eigen::VectorXd& coef);
};

/// [1, j, sin/cos pairs for p = 1..P, annual sines for m = 1..M].
Eigen::VectorXd deterministic_features(const ModelSpec& spec, std::int64_t j);

struct Design {
  Eigen::MatrixXd rows;     // one regression row per time step
  Eigen::VectorXd targets;  // T_j
};

/// Rows for series indices [first, last). Throws insufficient_history when
/// first < lags or the range is empty or out of bounds.
Design build_design(const HourlySeries& temps, std::size_t first, std::size_t last,
                    const ModelSpec& spec = {});

/// Ordinary least squares by column-pivoted Householder QR. Throws
/// insufficient_history (< 100 rows) or rank_deficient.
TemperatureModelParams fit_temperature(const HourlySeries& temps, std::size_t first, std::size_t last,
                                       const ModelSpec& spec = {});
/// Fits on every usable row of `temps`.
TemperatureModelParams fit_temperature(const HourlySeries& temps, const ModelSpec& spec = {});

/// One-step prediction at time index j given lags[k-1] = T_{j-k}.
double predict_step(const TemperatureModelParams& params, std::int64_t j, std::span<const double> lags);

/// Iterated forecast for the hours right after `history`; each prediction
/// feeds later lags. Throws insufficient_history.
HourlySeries forecast_temperature(const TemperatureModelParams& params, const HourlySeries& history,
                                  std::size_t horizon_hours);

/// Runs the model forward from `initial` (the hours immediately before
/// `start`, oldest first) adding N(0, noise_sd^2) innovations.
HourlySeries simulate_temperature(const TemperatureModelParams& params, Timestamp start,
                                  std::span<const double> initial, std::size_t hours, double noise_sd,
                                  std::uint64_t seed);

/// 100 * mean(|a - p| / |a|). Throws horizon_mismatch or zero_actual.
double mape(std::span<const double> actual, std::span<const double> predicted);
double mape(const HourlySeries& actual, const HourlySeries& predicted);

}  // namespace plf::temperature
