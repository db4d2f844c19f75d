#include "plf/pipeline.hpp"

#include "plf/csv_io.hpp"
#include "plf/errors.hpp"

#include <charconv>
#include <fstream>
#include <string>

namespace plf::pipeline {

namespace {

constexpr std::array<std::pair<MethodKind, std::string_view>, 8> kMethodNames{{
    {MethodKind::kde_w, "kde-w"},
    {MethodKind::ckd_w, "ckd-w"},
    {MethodKind::ckd_t, "ckd-t"},
    {MethodKind::qr, "qr"},
    {MethodKind::mix1, "mix1"},
    {MethodKind::mix2, "mix2"},
    {MethodKind::hybrid, "hybrid"},
    {MethodKind::benchmark, "benchmark"},
}};

kernel::ValidationWindow window_for(ValidationRegime regime, Timestamp start) {
  return regime == ValidationRegime::last_week ? kernel::last_week_before(start) : kernel::month_before(start);
}

const HourlySeries& require_temperature(const Dataset& data) {
  if (!data.temperature) fail(Errc::invalid_config, "CKD-T needs temperature data");
  return *data.temperature;
}

}  // namespace

std::string_view to_string(MethodKind kind) noexcept {
  for (const auto& [k, name] : kMethodNames)
    if (k == kind) return name;
  return "unknown";
}

MethodKind parse_method(std::string_view name) {
  for (const auto& [k, n] : kMethodNames)
    if (n == name) return k;
  fail(Errc::invalid_config, "unknown method '" + std::string(name) + "'");
}

ComponentCache::ComponentCache(std::shared_ptr<const Dataset> data, PipelineConfig config)
    : data_(std::move(data)), config_(std::move(config)) {
  if (!data_) fail(Errc::invalid_config, "pipeline needs a dataset");
  config_.cv.kernel.threads = config_.threads;
  config_.cv.temperature_spec = config_.temperature_spec;
  config_.qr.threads = config_.threads;
}

kernel::CvResult ComponentCache::tune(kernel::Method method, Timestamp horizon_start) {
  const auto regime = method == kernel::Method::kde_w   ? config_.kdew_validation
                      : method == kernel::Method::ckd_w ? config_.ckdw_validation
                                                        : config_.ckdt_validation;
  const HourlySeries* temps = method == kernel::Method::ckd_t ? &require_temperature(*data_) : nullptr;
  return kernel::cross_validate_kernel(method, data_->load, temps, window_for(regime, horizon_start),
                                       config_.lambda_grid, config_.cv);
}

kernel::KernelParams ComponentCache::params_for(kernel::Method method, Timestamp start) {
  const auto& fixed = method == kernel::Method::kde_w   ? config_.kdew_params
                      : method == kernel::Method::ckd_w ? config_.ckdw_params
                                                        : config_.ckdt_params;
  if (fixed) return *fixed;
  const auto key = std::pair{static_cast<int>(method), start.hours_since_epoch()};
  if (const auto it = params_.find(key); it != params_.end()) return it->second;
  const auto params = tune(method, start).params;
  params_.emplace(key, params);
  return params;
}

std::vector<double> ComponentCache::temperature_forecast(Timestamp start, std::size_t hours) {
  const auto& temps = require_temperature(*data_);
  const auto history = temps.before(start);
  const auto model = temperature::fit_temperature(history, config_.temperature_spec);
  const auto fc = temperature::forecast_temperature(model, history, hours);
  return {fc.values().begin(), fc.values().end()};
}

QuantileForecast ComponentCache::kdew(Timestamp start, std::size_t hours) {
  const auto key = std::pair{static_cast<int>(MethodKind::kde_w), Key{start.hours_since_epoch(), hours}};
  if (const auto it = forecasts_.find(key); it != forecasts_.end()) return it->second;
  auto fc = kernel::forecast_kernel(kernel::Method::kde_w, data_->load, nullptr, {}, start, hours,
                                    params_for(kernel::Method::kde_w, start), config_.cv.kernel);
  return forecasts_.emplace(key, std::move(fc)).first->second;
}

QuantileForecast ComponentCache::ckdw(Timestamp start, std::size_t hours) {
  const auto key = std::pair{static_cast<int>(MethodKind::ckd_w), Key{start.hours_since_epoch(), hours}};
  if (const auto it = forecasts_.find(key); it != forecasts_.end()) return it->second;
  auto fc = kernel::forecast_kernel(kernel::Method::ckd_w, data_->load, nullptr, {}, start, hours,
                                    params_for(kernel::Method::ckd_w, start), config_.cv.kernel);
  return forecasts_.emplace(key, std::move(fc)).first->second;
}

QuantileForecast ComponentCache::ckdt(Timestamp start, std::size_t hours) {
  const auto key = std::pair{static_cast<int>(MethodKind::ckd_t), Key{start.hours_since_epoch(), hours}};
  if (const auto it = forecasts_.find(key); it != forecasts_.end()) return it->second;
  const auto temps = temperature_forecast(start, hours);
  auto fc = kernel::forecast_kernel(kernel::Method::ckd_t, data_->load, &require_temperature(*data_), temps, start,
                                    hours, params_for(kernel::Method::ckd_t, start), config_.cv.kernel);
  return forecasts_.emplace(key, std::move(fc)).first->second;
}

QuantileForecast ComponentCache::qr(Timestamp start, std::size_t hours) {
  const auto key = std::pair{static_cast<int>(MethodKind::qr), Key{start.hours_since_epoch(), hours}};
  if (const auto it = forecasts_.find(key); it != forecasts_.end()) return it->second;
  auto fc = qr::qr_forecast(data_->load, start, hours, config_.qr);
  return forecasts_.emplace(key, std::move(fc)).first->second;
}

QuantileForecast ComponentCache::benchmark(Timestamp start, std::size_t hours) {
  return eval::benchmark_forecast(data_->load, start, hours);
}

QuantileForecast forecast_method(MethodKind kind, ComponentCache& cache, Timestamp start, std::size_t hours,
                                 const std::optional<hybrid::HybridWeights>& weights) {
  const auto day1 = std::min<std::size_t>(24, hours);
  switch (kind) {
    case MethodKind::kde_w: return cache.kdew(start, hours);
    case MethodKind::ckd_w: return cache.ckdw(start, hours);
    case MethodKind::ckd_t: return cache.ckdt(start, hours);
    case MethodKind::qr: return cache.qr(start, hours);
    case MethodKind::benchmark: return cache.benchmark(start, hours);
    case MethodKind::mix1: return hybrid::mix1(cache.ckdw(start, hours), cache.ckdt(start, day1));
    case MethodKind::mix2:
      return hybrid::mix2(cache.ckdw(start, hours), cache.ckdt(start, day1), cache.qr(start, hours));
    case MethodKind::hybrid: {
      const auto& w = weights ? weights : cache.config().weights;
      if (!w) fail(Errc::weights_missing, "hybrid forecast needs trained weights");
      return hybrid::hybrid(cache.ckdw(start, hours), cache.ckdt(start, day1), cache.qr(start, hours), *w);
    }
  }
  fail(Errc::invalid_config, "unknown method");
}

hybrid::HybridWeights train_hybrid_weights(ComponentCache& cache, std::span<const eval::TaskSpec> past_tasks,
                                           std::span<const double> grid) {
  if (past_tasks.empty()) fail(Errc::no_tasks, "weight training needs at least one past task");
  const auto& load = cache.data().load;
  std::vector<hybrid::PastTask> tasks;
  for (const auto& t : past_tasks) {
    const auto end = t.horizon_start + static_cast<std::int64_t>(t.horizon_hours);
    if (!load.covers(t.horizon_start, end))
      fail(Errc::horizon_mismatch, "load does not cover past task " + std::to_string(t.id));
    tasks.push_back({cache.ckdw(t.horizon_start, t.horizon_hours), cache.qr(t.horizon_start, t.horizon_hours),
                     load.slice(t.horizon_start, end)});
  }
  return hybrid::train_weights(tasks, grid);
}

std::vector<eval::Forecaster> make_forecasters(std::span<const MethodKind> kinds,
                                               std::shared_ptr<ComponentCache> cache,
                                               const std::optional<hybrid::HybridWeights>& weights) {
  std::vector<eval::Forecaster> out;
  for (const auto kind : kinds) {
    out.push_back({std::string(to_string(kind)), [kind, cache, weights](const eval::TaskSpec& task) {
                     return forecast_method(kind, *cache, task.horizon_start, task.horizon_hours, weights);
                   }});
  }
  return out;
}

void write_kernel_params(const std::filesystem::path& path, kernel::Method method,
                         const kernel::KernelParams& params) {
  std::ofstream out(path);
  if (!out) fail(Errc::io_error, "cannot write " + path.string());
  out << "method=" << kernel::to_string(method) << '\n'
      << "h_x=" << format_double(params.h_x) << '\n'
      << "h_w=" << format_double(params.h_w) << '\n'
      << "h_T=" << format_double(params.h_T) << '\n'
      << "lambda=" << format_double(params.lambda) << '\n';
  if (!out) fail(Errc::io_error, "write failed for " + path.string());
}

kernel::KernelParams read_kernel_params(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(Errc::io_error, "cannot open " + path.string());
  kernel::KernelParams params;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) fail(Errc::malformed_row, "expected key=value, got '" + line + "'");
    const auto key = line.substr(0, eq);
    const auto value = line.substr(eq + 1);
    if (key == "method") continue;
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
    if (ec != std::errc() || ptr != value.data() + value.size())
      fail(Errc::malformed_row, "bad number in '" + line + "'");
    if (key == "h_x") params.h_x = v;
    else if (key == "h_w") params.h_w = v;
    else if (key == "h_T") params.h_T = v;
    else if (key == "lambda") params.lambda = v;
    else fail(Errc::malformed_row, "unknown key '" + key + "'");
  }
  params.validate();
  return params;
}

}  // namespace plf::pipeline
