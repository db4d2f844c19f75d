#pragma once

#include "plf/calendar.hpp"
#include "plf/forecast.hpp"
#include "plf/series.hpp"

#include <Eigen/Dense>

#include <array>
#include <cstdint>
#include <span>
#include <vector>

namespace plf::qr {

inline constexpr std::size_t kDesignColumns = 6;

/// Model per hour of day on day index k:
///   L_k = a0 + a1 k + sum_{p=1,2} b_p sin(2 pi p (k + phi1)/365)
///                   + sum_{m=1,2} c_m sin(2 pi m (k + phi2)/365),  phi2 = phi1 - 182.
struct QrOptions {
  int window_days = 500;
  int min_days = 60;
  double phi1 = -111.0;
  /// Day index 1 is this date.
  Timestamp anchor = Timestamp::from_civil(2005, 1, 1);
  int threads = 1;
};

inline double second_phase(double phi1) noexcept { return phi1 - 364.0 / 2.0; }

/// 1-based calendar day index of `t` relative to `anchor`.
std::int64_t day_index(Timestamp t, Timestamp anchor) noexcept;

std::array<double, kDesignColumns> design_row(std::int64_t k, double phi1);

struct QuantileFit {
  Eigen::VectorXd coefficients;
  double objective = 0.0;  // sum of pinball terms
  std::vector<std::size_t> basis;  // optimal LP basis, reusable as a warm start
};

/// argmin_beta sum_t rho_q(y_t - x_t beta), solved as
///   min q 1'u + (1-q) 1'v  s.t.  X(b+ - b-) + u - v = y,  b+, b-, u, v >= 0.
/// `warm_basis` may hold the basis of a fit at another level on the same data.
QuantileFit fit_quantile_lp(const Eigen::MatrixXd& design, const Eigen::VectorXd& targets, double q,
                            std::span<const std::size_t> warm_basis = {});

/// Fits at every level in order on one LP tableau; each solve re-prices the
/// previous optimum. Same results as calling fit_quantile_lp per level.
std::vector<QuantileFit> fit_quantile_levels(const Eigen::MatrixXd& design, const Eigen::VectorXd& targets,
                                             std::span<const double> levels);

/// Per hour of day: fit all 99 levels on the last `window_days` days before
/// the horizon, evaluate at the horizon days and sort each row. Throws
/// insufficient_history when fewer than `min_days` days are usable.
QuantileForecast qr_forecast(const HourlySeries& history, Timestamp horizon_start, std::size_t horizon_hours,
                             const QrOptions& options = {});

}  // namespace plf::qr
