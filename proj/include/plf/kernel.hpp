#pragma once

#include "plf/calendar.hpp"
#include "plf/forecast.hpp"
#include "plf/optim.hpp"
#include "plf/series.hpp"
#include "plf/temperature_model.hpp"

#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace plf::kernel {

/// Bandwidths and time decay shared by the kernel family. h_w is only used by
/// CKD-W and h_T only by CKD-T.
struct KernelParams {
  double h_x = 1.0;     // load units
  double h_w = 1.0;     // hours of the week
  double h_T = 1.0;     // degrees F
  double lambda = 1.0;  // (0, 1]

  /// Throws invalid_config.
  void validate() const;
};

struct WeightedSample {
  double value = 0.0;
  double weight = 0.0;
};

/// Equal-bandwidth Gaussian mixture sum_i w_i K((x - X_i) / h) / h.
class DensityEstimate {
public:
  /// Normalizes the weights. Throws invalid_config for an empty sample set,
  /// negative or non-finite weights, zero total weight or h <= 0.
  DensityEstimate(std::vector<WeightedSample> samples, double bandwidth);

  std::span<const WeightedSample> samples() const noexcept { return samples_; }
  double bandwidth() const noexcept { return bandwidth_; }

  double cdf(double x) const noexcept;
  double pdf(double x) const noexcept;

private:
  std::vector<WeightedSample> samples_;
  double bandwidth_;
};

/// (2 pi)^(-1/2) exp(-u^2 / 2)
double gaussian_kernel(double u) noexcept;

/// Day distance with annual period and leap-year correction:
///   min(|D - (D_i - 1_A)|, T_i - |D - D_i|),  A = {D_i > 28 and T_i = 366}.
int decay_exponent(const CalendarStamp& forecast_day, const CalendarStamp& hist_day) noexcept;

enum class Method { kde_w, ckd_w, ckd_t };

std::string_view to_string(Method method) noexcept;

struct KernelOptions {
  /// Week-period distance min(|dw|, 168 - |dw|) instead of the plain difference.
  bool circular_week = false;
  /// CKD-W ignores observations before this hour when set.
  std::optional<Timestamp> ckdw_history_start;
  /// Half-width in days of the CKD-T calendar window.
  int ckdt_window_days = 5;
  /// Worker cap for per-hour parallelism.
  int threads = 1;
};

/// Uniform weights over `history`. Throws empty_history.
DensityEstimate kde_plain(std::span<const double> history, const KernelParams& params);

/// Observations sharing the target's period of the week, weighted by lambda^alpha.
/// Throws no_matching_period.
DensityEstimate kdew_density(const HourlySeries& history, const CalendarStamp& target,
                             const KernelParams& params);

/// All observations, weighted by lambda^alpha * K((w_i - w) / h_w). Throws empty_history.
DensityEstimate ckdw_density(const HourlySeries& history, const CalendarStamp& target,
                             const KernelParams& params, const KernelOptions& options = {});

/// Observations at the target hour within +/- window days of the target date in
/// every earlier year, weighted by K((T_i - T) / h_T). Throws empty_window.
DensityEstimate ckdt_density(const HourlySeries& history, const HourlySeries& temps,
                             const CalendarStamp& target, double forecast_temp,
                             const KernelParams& params, const KernelOptions& options = {});

/// Inverts the mixture CDF for strictly increasing levels in (0, 1); the result
/// satisfies |CDF(x) - q| <= 1e-10 and is nondecreasing. Throws bracket_failure.
std::vector<double> density_quantiles(const DensityEstimate& density, std::span<const double> levels);

/// One density per horizon hour using only observations before `horizon_start`.
/// CKD-T needs `temps` plus one temperature forecast per horizon hour.
QuantileForecast forecast_kernel(Method method, const HourlySeries& load, const HourlySeries* temps,
                                 std::span<const double> forecast_temps, Timestamp horizon_start,
                                 std::size_t horizon_hours, const KernelParams& params,
                                 const KernelOptions& options = {});

// ---------------------------------------------------------------------------
// Cross-validation
// ---------------------------------------------------------------------------

struct ValidationWindow {
  Timestamp start;
  Timestamp end;  // exclusive
};

/// The last seven days before `horizon_start`.
ValidationWindow last_week_before(Timestamp horizon_start) noexcept;
/// The calendar month preceding the month of `horizon_start`.
ValidationWindow month_before(Timestamp horizon_start) noexcept;

std::vector<double> default_lambda_grid();  // 0.92, 0.93, ..., 1.00

struct CvOptions {
  KernelOptions kernel;
  /// log_transform reproduces the unbounded search; clamp is the bounded ("CKD-W2") mode.
  optim::BoundMode bound_mode = optim::BoundMode::log_transform;
  double scalar_tol_fraction = 1e-4;  // times sd(history)
  double simplex_tol = 1e-3;
  /// CKD-T: temperature model used for the day-ahead forecasts of the validation window.
  temperature::ModelSpec temperature_spec;
};

struct LambdaTrial {
  double lambda = 1.0;
  double loss = 0.0;
  KernelParams params;
};

struct CvResult {
  KernelParams params;
  double loss = 0.0;
  std::vector<LambdaTrial> trials;  // grid order
};

/// For each lambda, tunes the bandwidths on the validation window using only
/// data before it; returns the lowest mean pinball (ties to the smaller lambda).
/// Throws window_outside_history.
CvResult cross_validate_kernel(Method method, const HourlySeries& load, const HourlySeries* temps,
                               const ValidationWindow& window, std::span<const double> lambda_grid,
                               const CvOptions& options = {});

/// Mean pinball of a kernel forecast over the window for fixed parameters
/// (the cross-validation objective).
double validation_loss(Method method, const HourlySeries& load, const HourlySeries* temps,
                       const ValidationWindow& window, const KernelParams& params,
                       const CvOptions& options = {});

}  // namespace plf::kernel
