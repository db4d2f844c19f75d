#include "kernel_detail.hpp"

#include "plf/errors.hpp"
#include "plf/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

namespace plf::kernel {

namespace {

constexpr double kInvSqrt2Pi = 0.39894228040143267794;
constexpr double kInvSqrt2 = 0.70710678118654752440;

void check_levels(std::span<const double> levels) {
  if (levels.empty()) fail(Errc::invalid_config, "no quantile levels requested");
  for (std::size_t i = 0; i < levels.size(); ++i) {
    if (!(levels[i] > 0.0 && levels[i] < 1.0)) fail(Errc::invalid_config, "quantile level outside (0, 1)");
    if (i > 0 && !(levels[i] > levels[i - 1])) fail(Errc::invalid_config, "quantile levels must increase");
  }
}

DensityEstimate to_density(const detail::HourCase& hour, Method method, const KernelParams& params) {
  std::vector<double> w;
  detail::case_weights(method, hour, params, w);
  std::vector<WeightedSample> samples(hour.values.size());
  for (std::size_t i = 0; i < samples.size(); ++i) samples[i] = {hour.values[i], w[i]};
  return DensityEstimate(std::move(samples), params.h_x);
}

struct History {
  detail::SeriesCalendar calendar;
  detail::GatherContext context;
};

History history_before(const HourlySeries& series, Timestamp cutoff, const HourlySeries* temps) {
  History h;
  const auto usable = cutoff <= series.start() ? std::size_t{0}
                      : cutoff >= series.end() ? series.size()
                                               : static_cast<std::size_t>(cutoff - series.start());
  h.calendar = detail::series_calendar(series.start(), usable);
  h.context = {&series, nullptr, usable, temps};
  return h;
}

}  // namespace

void KernelParams::validate() const {
  const auto positive = [](double v) { return std::isfinite(v) && v > 0.0; };
  if (!positive(h_x) || !positive(h_w) || !positive(h_T))
    fail(Errc::invalid_config, "kernel bandwidths must be positive and finite");
  if (!(lambda > 0.0 && lambda <= 1.0)) fail(Errc::invalid_config, "lambda must lie in (0, 1]");
}

DensityEstimate::DensityEstimate(std::vector<WeightedSample> samples, double bandwidth)
    : samples_(std::move(samples)), bandwidth_(bandwidth) {
  if (samples_.empty()) fail(Errc::invalid_config, "density needs at least one sample");
  if (!(std::isfinite(bandwidth_) && bandwidth_ > 0.0)) fail(Errc::invalid_config, "bandwidth must be positive");
  double total = 0.0;
  for (const auto& s : samples_) {
    if (!std::isfinite(s.value) || !std::isfinite(s.weight) || s.weight < 0.0)
      fail(Errc::invalid_config, "sample values must be finite with nonnegative weights");
    total += s.weight;
  }
  if (!(total > 0.0)) fail(Errc::invalid_config, "sample weights sum to zero");
  for (auto& s : samples_) s.weight /= total;
}

double DensityEstimate::cdf(double x) const noexcept {
  double sum = 0.0;
  for (const auto& s : samples_) sum += s.weight * std::erfc((s.value - x) * kInvSqrt2 / bandwidth_);
  return 0.5 * sum;
}

double DensityEstimate::pdf(double x) const noexcept {
  double sum = 0.0;
  for (const auto& s : samples_) sum += s.weight * gaussian_kernel((x - s.value) / bandwidth_);
  return sum / bandwidth_;
}

double gaussian_kernel(double u) noexcept { return kInvSqrt2Pi * std::exp(-0.5 * u * u); }

int decay_exponent(const CalendarStamp& forecast_day, const CalendarStamp& hist_day) noexcept {
  const int d = forecast_day.day_of_year;
  const int di = hist_day.day_of_year;
  const int ti = hist_day.year_length;
  const int shift = (di > 28 && ti == 366) ? 1 : 0;
  return std::min(std::abs(d - (di - shift)), ti - std::abs(d - di));
}

std::string_view to_string(Method method) noexcept {
  switch (method) {
    case Method::kde_w: return "kde-w";
    case Method::ckd_w: return "ckd-w";
    case Method::ckd_t: return "ckd-t";
  }
  return "unknown";
}

DensityEstimate kde_plain(std::span<const double> history, const KernelParams& params) {
  if (history.empty()) fail(Errc::empty_history, "kernel density needs observations");
  if (!(params.h_x > 0.0)) fail(Errc::invalid_config, "bandwidth must be positive");
  std::vector<WeightedSample> samples;
  samples.reserve(history.size());
  for (double v : history) samples.push_back({v, 1.0});
  return DensityEstimate(std::move(samples), params.h_x);
}

DensityEstimate kdew_density(const HourlySeries& history, const CalendarStamp& target, const KernelParams& params) {
  params.validate();
  const auto h = history_before(history, history.end(), nullptr);
  auto ctx = h.context;
  ctx.calendar = &h.calendar;
  return to_density(detail::gather(Method::kde_w, ctx, target, 0.0, {}), Method::kde_w, params);
}

DensityEstimate ckdw_density(const HourlySeries& history, const CalendarStamp& target, const KernelParams& params,
                             const KernelOptions& options) {
  params.validate();
  const auto h = history_before(history, history.end(), nullptr);
  auto ctx = h.context;
  ctx.calendar = &h.calendar;
  return to_density(detail::gather(Method::ckd_w, ctx, target, 0.0, options), Method::ckd_w, params);
}

DensityEstimate ckdt_density(const HourlySeries& history, const HourlySeries& temps, const CalendarStamp& target,
                             double forecast_temp, const KernelParams& params, const KernelOptions& options) {
  params.validate();
  const auto h = history_before(history, history.end(), &temps);
  auto ctx = h.context;
  ctx.calendar = &h.calendar;
  return to_density(detail::gather(Method::ckd_t, ctx, target, forecast_temp, options), Method::ckd_t, params);
}

std::vector<double> density_quantiles(const DensityEstimate& density, std::span<const double> levels) {
  check_levels(levels);
  auto samples = std::vector<WeightedSample>(density.samples().begin(), density.samples().end());
  std::stable_sort(samples.begin(), samples.end(), [](const auto& a, const auto& b) { return a.value < b.value; });
  std::vector<double> values(samples.size()), weights(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    values[i] = samples[i].value;
    weights[i] = samples[i].weight;
  }
  detail::SortedMixture mixture;
  mixture.assign_sorted(values, weights, density.bandwidth());
  std::vector<double> out(levels.size());
  mixture.quantiles(levels, out);
  return out;
}

QuantileForecast forecast_kernel(Method method, const HourlySeries& load, const HourlySeries* temps,
                                 std::span<const double> forecast_temps, Timestamp horizon_start,
                                 std::size_t horizon_hours, const KernelParams& params, const KernelOptions& options) {
  params.validate();
  if (horizon_hours == 0) fail(Errc::invalid_config, "horizon must contain at least one hour");
  if (method == Method::ckd_t) {
    if (temps == nullptr) fail(Errc::invalid_config, "CKD-T needs temperatures");
    if (forecast_temps.size() != horizon_hours)
      fail(Errc::horizon_mismatch, "CKD-T needs one temperature forecast per horizon hour");
  }
  if (horizon_start <= load.start()) fail(Errc::empty_history, "no load history before " + horizon_start.iso());

  auto h = history_before(load, horizon_start, temps);
  h.context.calendar = &h.calendar;
  QuantileForecast out(horizon_start, horizon_hours);
  parallel_for(horizon_hours, options.threads, [&](std::size_t i) {
    const auto target = calendar_stamp(horizon_start + static_cast<std::int64_t>(i));
    const double temp = method == Method::ckd_t ? forecast_temps[i] : 0.0;
    const auto hour = detail::gather(method, h.context, target, temp, options);
    detail::SortedMixture mixture;
    std::vector<double> scratch;
    detail::case_quantiles(method, hour, params, mixture, scratch, out.row(i));
  });
  return out;
}

namespace detail {

SeriesCalendar series_calendar(Timestamp start, std::size_t n) {
  SeriesCalendar cal;
  cal.period.resize(n);
  cal.day_of_year.resize(n);
  cal.year_length.resize(n);
  std::size_t i = 0;
  Timestamp t = start;
  while (i < n) {
    const auto s = calendar_stamp(t);
    // Fill the rest of this calendar day from a single stamp.
    const int hours_left = 24 - (s.hour_of_day - 1);
    for (int k = 0; k < hours_left && i < n; ++k, ++i) {
      cal.period[i] = static_cast<std::int16_t>(s.period_of_week + k);
      cal.day_of_year[i] = static_cast<std::int16_t>(s.day_of_year);
      cal.year_length[i] = static_cast<std::int16_t>(s.year_length);
    }
    t = t + hours_left;
  }
  return cal;
}

namespace {

int decay_of(const CalendarStamp& target, const SeriesCalendar& cal, std::size_t i) {
  CalendarStamp hist;
  hist.day_of_year = cal.day_of_year[i];
  hist.year_length = cal.year_length[i];
  return decay_exponent(target, hist);
}

void sort_case(HourCase& c) {
  std::vector<std::size_t> order(c.values.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return c.values[a] < c.values[b]; });
  const auto permute = [&](std::vector<double>& v) {
    if (v.empty()) return;
    std::vector<double> sorted(v.size());
    for (std::size_t k = 0; k < order.size(); ++k) sorted[k] = v[order[k]];
    v.swap(sorted);
  };
  permute(c.values);
  permute(c.decay);
  permute(c.offset);
}

}  // namespace

HourCase gather(Method method, const GatherContext& context, const CalendarStamp& target, double forecast_temp,
                const KernelOptions& options) {
  const auto& load = *context.load;
  const auto& cal = *context.calendar;
  const std::size_t n = context.usable;
  HourCase c;
  switch (method) {
    case Method::kde_w: {
      std::size_t first = 0;
      while (first < n && first < 168 && cal.period[first] != target.period_of_week) ++first;
      for (std::size_t i = first; i < n; i += 168) {
        c.values.push_back(load[i]);
        c.decay.push_back(decay_of(target, cal, i));
      }
      if (c.values.empty())
        fail(Errc::no_matching_period, "no observation in period " + std::to_string(target.period_of_week));
      break;
    }
    case Method::ckd_w: {
      std::size_t first = 0;
      if (options.ckdw_history_start && *options.ckdw_history_start > load.start())
        first = static_cast<std::size_t>(*options.ckdw_history_start - load.start());
      if (first >= n) fail(Errc::empty_history, "no CKD-W observations before the target");
      c.values.reserve(n - first);
      c.decay.reserve(n - first);
      c.offset.reserve(n - first);
      for (std::size_t i = first; i < n; ++i) {
        c.values.push_back(load[i]);
        c.decay.push_back(decay_of(target, cal, i));
        int dw = cal.period[i] - target.period_of_week;
        if (options.circular_week) dw = std::min(std::abs(dw), 168 - std::abs(dw));
        c.offset.push_back(dw);
      }
      break;
    }
    case Method::ckd_t: {
      if (context.temps == nullptr) fail(Errc::invalid_config, "CKD-T needs temperatures");
      const auto& temps = *context.temps;
      const int first_year = load.start().year();
      for (int year = first_year; year < target.year; ++year) {
        const int day = (target.month == 2 && target.day == 29 && !is_leap_year(year)) ? 28 : target.day;
        const auto centre = Timestamp::from_civil(year, target.month, day, target.hour_of_day - 1);
        for (int k = -options.ckdt_window_days; k <= options.ckdt_window_days; ++k) {
          const auto t = centre + 24 * static_cast<std::int64_t>(k);
          const auto li = load.index_of(t);
          const auto ti = temps.index_of(t);
          if (!li || !ti || *li >= n) continue;
          c.values.push_back(load[*li]);
          c.offset.push_back(temps[*ti] - forecast_temp);
        }
      }
      if (c.values.empty()) fail(Errc::empty_window, "no CKD-T observations for " + std::to_string(target.year) +
                                                         "-" + std::to_string(target.month) + "-" +
                                                         std::to_string(target.day));
      break;
    }
  }
  sort_case(c);
  return c;
}

void case_weights(Method method, const HourCase& hour, const KernelParams& params, std::vector<double>& out) {
  const std::size_t n = hour.values.size();
  out.assign(n, 0.0);
  const double log_lambda = method == Method::ckd_t ? 0.0 : std::log(params.lambda);
  const double h2 = method == Method::ckd_w ? params.h_w : params.h_T;
  const double inv_h2 = 1.0 / h2;
  const bool use_decay = !hour.decay.empty() && log_lambda != 0.0;
  const bool use_offset = !hour.offset.empty() && method != Method::kde_w;
  double top = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    double lw = use_decay ? hour.decay[i] * log_lambda : 0.0;
    if (use_offset) {
      const double u = hour.offset[i] * inv_h2;
      lw -= 0.5 * u * u;
    }
    out[i] = lw;
    top = std::max(top, lw);
  }
  for (double& w : out) w = std::exp(w - top);
}

void case_quantiles(Method method, const HourCase& hour, const KernelParams& params, SortedMixture& mixture,
                    std::vector<double>& scratch, std::span<double> out) {
  case_weights(method, hour, params, scratch);
  mixture.assign_sorted(hour.values, scratch, params.h_x);
  mixture.quantiles(quantile_levels(), out);
}

}  // namespace detail

}  // namespace plf::kernel
