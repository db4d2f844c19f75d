#pragma once

#include "plf/evaluation.hpp"
#include "plf/forecast.hpp"
#include "plf/hybrid.hpp"
#include "plf/kernel.hpp"
#include "plf/quantile_regression.hpp"
#include "plf/series.hpp"
#include "plf/temperature_model.hpp"

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace plf::pipeline {

enum class MethodKind { kde_w, ckd_w, ckd_t, qr, mix1, mix2, hybrid, benchmark };

std::string_view to_string(MethodKind kind) noexcept;
/// Throws invalid_config.
MethodKind parse_method(std::string_view name);

enum class ValidationRegime { last_week, previous_month };

struct Dataset {
  HourlySeries load;
  std::optional<HourlySeries> temperature;  // mean over stations
};

struct PipelineConfig {
  std::vector<double> lambda_grid = kernel::default_lambda_grid();
  ValidationRegime kdew_validation = ValidationRegime::previous_month;
  ValidationRegime ckdw_validation = ValidationRegime::last_week;
  ValidationRegime ckdt_validation = ValidationRegime::last_week;
  kernel::CvOptions cv;
  qr::QrOptions qr;
  temperature::ModelSpec temperature_spec;
  /// Fixed parameters skip cross-validation for that method.
  std::optional<kernel::KernelParams> kdew_params;
  std::optional<kernel::KernelParams> ckdw_params;
  std::optional<kernel::KernelParams> ckdt_params;
  std::optional<hybrid::HybridWeights> weights;
  std::vector<double> weight_grid = hybrid::default_weight_grid();
  int threads = 1;

  PipelineConfig() { cv.kernel.ckdw_history_start = Timestamp::from_civil(2008, 1, 1); }
};

/// Everything the mixes are assembled from, for one horizon.
struct Components {
  QuantileForecast kdew, ckdw, ckdt, qr, benchmark;
  kernel::KernelParams kdew_params, ckdw_params, ckdt_params;
};

/// Lazily builds and memoizes component forecasts per horizon so that every
/// method of a task shares one tuning run.
class ComponentCache {
public:
  ComponentCache(std::shared_ptr<const Dataset> data, PipelineConfig config);

  const Dataset& data() const noexcept { return *data_; }
  const PipelineConfig& config() const noexcept { return config_; }

  QuantileForecast kdew(Timestamp start, std::size_t hours);
  QuantileForecast ckdw(Timestamp start, std::size_t hours);
  QuantileForecast ckdt(Timestamp start, std::size_t hours);
  QuantileForecast qr(Timestamp start, std::size_t hours);
  QuantileForecast benchmark(Timestamp start, std::size_t hours);

  kernel::CvResult tune(kernel::Method method, Timestamp horizon_start);
  /// Temperature forecast for the horizon from a model fitted before it.
  std::vector<double> temperature_forecast(Timestamp start, std::size_t hours);

private:
  using Key = std::pair<std::int64_t, std::size_t>;
  kernel::KernelParams params_for(kernel::Method method, Timestamp start);

  std::shared_ptr<const Dataset> data_;
  PipelineConfig config_;
  std::map<std::pair<int, Key>, QuantileForecast> forecasts_;
  std::map<std::pair<int, std::int64_t>, kernel::KernelParams> params_;
};

/// Forecast of one method; hybrid requires `weights` in the cache's config
/// (throws weights_missing otherwise).
QuantileForecast forecast_method(MethodKind kind, ComponentCache& cache, Timestamp start, std::size_t hours,
                                 const std::optional<hybrid::HybridWeights>& weights);

/// CKD-W and QR forecasts plus actuals for each earlier horizon, then
/// hybrid::train_weights.
hybrid::HybridWeights train_hybrid_weights(ComponentCache& cache, std::span<const eval::TaskSpec> past_tasks,
                                           std::span<const double> grid);

std::vector<eval::Forecaster> make_forecasters(std::span<const MethodKind> kinds,
                                               std::shared_ptr<ComponentCache> cache,
                                               const std::optional<hybrid::HybridWeights>& weights);

/// `key=value` text for kernel parameters (method, h_x, h_w, h_T, lambda).
void write_kernel_params(const std::filesystem::path& path, kernel::Method method,
                         const kernel::KernelParams& params);
kernel::KernelParams read_kernel_params(const std::filesystem::path& path);

}  // namespace plf::pipeline
