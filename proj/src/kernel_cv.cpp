#include "kernel_detail.hpp"

#include "plf/errors.hpp"
#include "plf/parallel.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>

namespace plf::kernel {

namespace {

struct Problem {
  Method method = Method::kde_w;
  std::vector<detail::HourCase> cases;
  std::vector<double> actuals;
  double sigma = 1.0;
  int threads = 1;
};

std::vector<double> rolling_temperature_forecasts(const HourlySeries& temps, const ValidationWindow& window,
                                                  const temperature::ModelSpec& spec) {
  const auto cut = temps.index_of(window.start);
  if (!cut || !temps.covers(window.start, window.end))
    fail(Errc::window_outside_history, "temperatures do not cover the validation window");
  const auto model = temperature::fit_temperature(temps, static_cast<std::size_t>(spec.lags), *cut, spec);
  std::vector<double> out;
  for (Timestamp day = window.start; day < window.end; day = day + 24) {
    const auto len = static_cast<std::size_t>(std::min<std::int64_t>(24, window.end - day));
    const auto fc = temperature::forecast_temperature(model, temps.before(day), len);
    out.insert(out.end(), fc.values().begin(), fc.values().end());
  }
  return out;
}

Problem build_problem(Method method, const HourlySeries& load, const HourlySeries* temps,
                      const ValidationWindow& window, const CvOptions& options) {
  if (!(window.start < window.end) || !load.covers(window.start, window.end) || window.start <= load.start())
    fail(Errc::window_outside_history, "validation window [" + window.start.iso() + ", " + window.end.iso() +
                                           ") must lie inside the load history after its first hour");
  if (method == Method::ckd_t && temps == nullptr) fail(Errc::invalid_config, "CKD-T needs temperatures");

  Problem p;
  p.method = method;
  p.threads = options.kernel.threads;
  const auto usable = static_cast<std::size_t>(window.start - load.start());
  const auto history = load.values().first(usable);
  const double mean = std::accumulate(history.begin(), history.end(), 0.0) / static_cast<double>(usable);
  double ss = 0.0;
  for (double v : history) ss += (v - mean) * (v - mean);
  p.sigma = std::max(std::sqrt(ss / static_cast<double>(usable)), 1e-9 * (1.0 + std::abs(mean)));

  std::vector<double> temp_forecasts;
  if (method == Method::ckd_t) temp_forecasts = rolling_temperature_forecasts(*temps, window, options.temperature_spec);

  const auto calendar = detail::series_calendar(load.start(), usable);
  const detail::GatherContext context{&load, &calendar, usable, temps};
  const auto hours = static_cast<std::size_t>(window.end - window.start);
  p.cases.resize(hours);
  p.actuals.resize(hours);
  parallel_for(hours, p.threads, [&](std::size_t i) {
    const auto t = window.start + static_cast<std::int64_t>(i);
    const double temp = method == Method::ckd_t ? temp_forecasts[i] : 0.0;
    p.cases[i] = detail::gather(method, context, calendar_stamp(t), temp, options.kernel);
    p.actuals[i] = load[*load.index_of(t)];
  });
  return p;
}

double problem_loss(const Problem& p, const KernelParams& params) {
  std::vector<double> per_hour(p.cases.size());
  parallel_for(p.cases.size(), p.threads, [&](std::size_t i) {
    thread_local detail::SortedMixture mixture;
    thread_local std::vector<double> scratch;
    std::array<double, kQuantileCount> q{};
    detail::case_quantiles(p.method, p.cases[i], params, mixture, scratch, q);
    const auto& levels = quantile_levels();
    double sum = 0.0;
    for (std::size_t k = 0; k < kQuantileCount; ++k) sum += pinball_loss_term(levels[k], p.actuals[i] - q[k]);
    per_hour[i] = sum / static_cast<double>(kQuantileCount);
  });
  // Ordered reduction keeps the result independent of the thread count.
  return std::accumulate(per_hour.begin(), per_hour.end(), 0.0) / static_cast<double>(per_hour.size());
}

constexpr double kOutOfDomain = 1e100;

}  // namespace

ValidationWindow last_week_before(Timestamp horizon_start) noexcept { return {horizon_start - 168, horizon_start}; }

ValidationWindow month_before(Timestamp horizon_start) noexcept {
  const auto s = calendar_stamp(horizon_start);
  const auto end = Timestamp::from_civil(s.year, s.month, 1);
  const auto start = s.month == 1 ? Timestamp::from_civil(s.year - 1, 12, 1) : Timestamp::from_civil(s.year, s.month - 1, 1);
  return {start, end};
}

std::vector<double> default_lambda_grid() {
  std::vector<double> grid;
  for (int k = 92; k <= 100; ++k) grid.push_back(k / 100.0);
  return grid;
}

double validation_loss(Method method, const HourlySeries& load, const HourlySeries* temps,
                       const ValidationWindow& window, const KernelParams& params, const CvOptions& options) {
  params.validate();
  return problem_loss(build_problem(method, load, temps, window, options), params);
}

CvResult cross_validate_kernel(Method method, const HourlySeries& load, const HourlySeries* temps,
                               const ValidationWindow& window, std::span<const double> lambda_grid,
                               const CvOptions& options) {
  if (lambda_grid.empty()) fail(Errc::invalid_config, "lambda grid is empty");
  for (double l : lambda_grid)
    if (!(l > 0.0 && l <= 1.0)) fail(Errc::invalid_config, "lambda grid values must lie in (0, 1]");

  const auto problem = build_problem(method, load, temps, window, options);
  const double hx_lo = 1e-3 * problem.sigma, hx_hi = 10.0 * problem.sigma;
  const std::pair<double, double> second_bounds = method == Method::ckd_w ? std::pair{0.1, 500.0} : std::pair{0.1, 50.0};

  const auto n = static_cast<double>(problem.cases.front().values.size());
  KernelParams warm;
  warm.h_x = std::clamp(1.06 * problem.sigma * std::pow(n, -0.2), hx_lo, hx_hi);
  warm.h_w = 3.0;
  warm.h_T = 3.0;

  // CKD-T carries no time decay, so only lambda = 1 is meaningful.
  const std::vector<double> ckdt_grid{1.0};
  const auto grid = method == Method::ckd_t ? std::span<const double>(ckdt_grid) : lambda_grid;

  CvResult result;
  for (double lambda : grid) {
    LambdaTrial trial;
    trial.lambda = lambda;
    trial.params = warm;
    trial.params.lambda = lambda;
    if (method == Method::kde_w) {
      const optim::ScalarObjective objective{
          [&](double hx) {
            auto p = trial.params;
            p.h_x = hx;
            return problem_loss(problem, p);
          },
          hx_lo, hx_hi};
      const auto best = optim::minimize_bounded_scalar(objective, options.scalar_tol_fraction * problem.sigma);
      trial.params.h_x = best.argmin;
      trial.loss = best.value;
    } else {
      double KernelParams::*second = method == Method::ckd_w ? &KernelParams::h_w : &KernelParams::h_T;
      optim::VectorObjective objective;
      objective.dimension = 2;
      objective.bounds = std::vector<std::pair<double, double>>{{hx_lo, hx_hi}, second_bounds};
      objective.evaluate = [&](std::span<const double> x) {
        if (!(x[0] > 0.0) || !(x[1] > 0.0)) return kOutOfDomain;
        auto p = trial.params;
        p.h_x = x[0];
        p.*second = x[1];
        return problem_loss(problem, p);
      };
      const std::array<double, 2> start{std::clamp(warm.h_x, hx_lo, hx_hi),
                                        std::clamp(warm.*second, second_bounds.first, second_bounds.second)};
      const auto best = optim::minimize_nelder_mead(objective, start, options.simplex_tol, options.bound_mode);
      trial.params.h_x = best.argmin[0];
      trial.params.*second = best.argmin[1];
      trial.loss = best.value;
      warm = trial.params;
    }
    result.trials.push_back(trial);
  }

  const auto* chosen = &result.trials.front();
  for (const auto& t : result.trials)
    if (t.loss < chosen->loss || (t.loss == chosen->loss && t.lambda < chosen->lambda)) chosen = &t;
  result.params = chosen->params;
  result.loss = chosen->loss;
  return result;
}

}  // namespace plf::kernel
