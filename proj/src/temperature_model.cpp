#include "plf/temperature_model.hpp"

#include "plf/errors.hpp"

#include <cmath>
#include <functional>
#include <numbers>
#include <random>
#include <string>

namespace plf::temperature {

namespace {

void check_spec(const ModelSpec& spec) {
  if (spec.daily_harmonics < 0 || spec.annual_harmonics < 0 || spec.lags < 0)
    fail(Errc::invalid_config, "temperature model sizes must be nonnegative");
}

std::int64_t hour_index(const ModelSpec& spec, Timestamp t) { return t - spec.anchor; }

}  // namespace

Eigen::VectorXd TemperatureModelParams::coefficients() const {
  Eigen::VectorXd c(static_cast<Eigen::Index>(spec.row_length()));
  Eigen::Index k = 0;
  c[k++] = beta0;
  c[k++] = beta1;
  for (int p = 0; p < spec.daily_harmonics; ++p) {
    c[k++] = gamma.at(p);
    c[k++] = delta.at(p);
  }
  for (int m = 0; m < spec.annual_harmonics; ++m) c[k++] = psi.at(m);
  for (int l = 0; l < spec.lags; ++l) c[k++] = alpha.at(l);
  return c;
}

TemperatureModelParams TemperatureModelParams::from_coefficients(const ModelSpec& spec, const Eigen::VectorXd& coef) {
  check_spec(spec);
  if (coef.size() != static_cast<Eigen::Index>(spec.row_length()))
    fail(Errc::invalid_config, "coefficient vector has " + std::to_string(coef.size()) + " entries, expected " +
                                   std::to_string(spec.row_length()));
  TemperatureModelParams p;
  p.spec = spec;
  Eigen::Index k = 0;
  p.beta0 = coef[k++];
  p.beta1 = coef[k++];
  for (int i = 0; i < spec.daily_harmonics; ++i) {
    p.gamma.push_back(coef[k++]);
    p.delta.push_back(coef[k++]);
  }
  for (int m = 0; m < spec.annual_harmonics; ++m) p.psi.push_back(coef[k++]);
  for (int l = 0; l < spec.lags; ++l) p.alpha.push_back(coef[k++]);
  return p;
}

Eigen::VectorXd deterministic_features(const ModelSpec& spec, std::int64_t j) {
  check_spec(spec);
  constexpr double two_pi = 2.0 * std::numbers::pi;
  Eigen::VectorXd f(static_cast<Eigen::Index>(spec.deterministic_length()));
  Eigen::Index k = 0;
  f[k++] = 1.0;
  f[k++] = static_cast<double>(j);
  const auto d = static_cast<double>(((j % 24) + 24) % 24);
  for (int p = 1; p <= spec.daily_harmonics; ++p) {
    f[k++] = std::sin(two_pi * p * d / 24.0);
    f[k++] = std::cos(two_pi * p * d / 24.0);
  }
  const double days = static_cast<double>(j) / 24.0;
  for (int m = 1; m <= spec.annual_harmonics; ++m)
    f[k++] = std::sin(two_pi * m * (days + spec.annual_phase_days) / 365.0);
  return f;
}

Design build_design(const HourlySeries& temps, std::size_t first, std::size_t last, const ModelSpec& spec) {
  check_spec(spec);
  const auto lags = static_cast<std::size_t>(spec.lags);
  if (first < lags || first >= last || last > temps.size())
    fail(Errc::insufficient_history, "design rows [" + std::to_string(first) + ", " + std::to_string(last) +
                                         ") need " + std::to_string(lags) + " earlier hours inside a series of " +
                                         std::to_string(temps.size()));
  const auto rows = static_cast<Eigen::Index>(last - first);
  const auto det = static_cast<Eigen::Index>(spec.deterministic_length());
  Design d;
  d.rows.resize(rows, static_cast<Eigen::Index>(spec.row_length()));
  d.targets.resize(rows);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const auto i = first + static_cast<std::size_t>(r);
    d.rows.row(r).head(det) = deterministic_features(spec, hour_index(spec, temps.time_at(i))).transpose();
    for (std::size_t l = 1; l <= lags; ++l) d.rows(r, det + static_cast<Eigen::Index>(l) - 1) = temps[i - l];
    d.targets[r] = temps[i];
  }
  return d;
}

TemperatureModelParams fit_temperature(const HourlySeries& temps, std::size_t first, std::size_t last,
                                       const ModelSpec& spec) {
  if (last < first + 100) fail(Errc::insufficient_history, "temperature fit needs at least 100 rows");
  const auto design = build_design(temps, first, last, spec);
  const Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design.rows);
  if (qr.rank() < design.rows.cols())
    fail(Errc::rank_deficient, "temperature design has rank " + std::to_string(qr.rank()) + " < " +
                                   std::to_string(design.rows.cols()));
  return TemperatureModelParams::from_coefficients(spec, qr.solve(design.targets));
}

TemperatureModelParams fit_temperature(const HourlySeries& temps, const ModelSpec& spec) {
  return fit_temperature(temps, static_cast<std::size_t>(std::max(0, spec.lags)), temps.size(), spec);
}

double predict_step(const TemperatureModelParams& params, std::int64_t j, std::span<const double> lags) {
  const auto& spec = params.spec;
  if (lags.size() < static_cast<std::size_t>(spec.lags)) fail(Errc::insufficient_history, "too few lag values");
  const auto f = deterministic_features(spec, j);
  double value = params.beta0 * f[0] + params.beta1 * f[1];
  Eigen::Index k = 2;
  for (int p = 0; p < spec.daily_harmonics; ++p) {
    value += params.gamma[p] * f[k++];
    value += params.delta[p] * f[k++];
  }
  for (int m = 0; m < spec.annual_harmonics; ++m) value += params.psi[m] * f[k++];
  for (int l = 0; l < spec.lags; ++l) value += params.alpha[l] * lags[l];
  return value;
}

namespace {

// buffer holds the most recent values oldest first; returns the next `hours` predictions.
std::vector<double> roll_forward(const TemperatureModelParams& params, std::vector<double> buffer,
                                 std::int64_t first_j, std::size_t hours,
                                 const std::function<double()>& innovation) {
  const auto lags = static_cast<std::size_t>(params.spec.lags);
  std::vector<double> lag_values(lags);
  std::vector<double> out;
  out.reserve(hours);
  for (std::size_t h = 0; h < hours; ++h) {
    for (std::size_t l = 0; l < lags; ++l) lag_values[l] = buffer[buffer.size() - 1 - l];
    double next = predict_step(params, first_j + static_cast<std::int64_t>(h), lag_values);
    if (innovation) next += innovation();
    buffer.push_back(next);
    out.push_back(next);
  }
  return out;
}

}  // namespace

HourlySeries forecast_temperature(const TemperatureModelParams& params, const HourlySeries& history,
                                  std::size_t horizon_hours) {
  const auto lags = static_cast<std::size_t>(params.spec.lags);
  if (history.size() < lags) fail(Errc::insufficient_history, "forecast needs " + std::to_string(lags) + " hours");
  if (horizon_hours == 0) fail(Errc::insufficient_history, "forecast horizon must be at least one hour");
  const auto tail = history.values().last(lags);
  auto values = roll_forward(params, std::vector<double>(tail.begin(), tail.end()),
                             hour_index(params.spec, history.end()), horizon_hours, {});
  return HourlySeries(history.end(), std::move(values), Unit::temperature);
}

HourlySeries simulate_temperature(const TemperatureModelParams& params, Timestamp start,
                                  std::span<const double> initial, std::size_t hours, double noise_sd,
                                  std::uint64_t seed) {
  const auto lags = static_cast<std::size_t>(params.spec.lags);
  if (initial.size() < lags) fail(Errc::insufficient_history, "simulation needs " + std::to_string(lags) + " seed hours");
  if (hours == 0) fail(Errc::invalid_config, "simulation length must be positive");
  if (!(noise_sd >= 0.0)) fail(Errc::invalid_config, "noise sd must be nonnegative");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, noise_sd);
  std::function<double()> innovation;
  if (noise_sd > 0.0) innovation = [&] { return noise(rng); };
  const auto tail = initial.last(lags);
  auto values = roll_forward(params, std::vector<double>(tail.begin(), tail.end()), hour_index(params.spec, start),
                             hours, innovation);
  return HourlySeries(start, std::move(values), Unit::temperature);
}

double mape(std::span<const double> actual, std::span<const double> predicted) {
  if (actual.size() != predicted.size() || actual.empty())
    fail(Errc::horizon_mismatch, "MAPE needs two nonempty series of equal length");
  double sum = 0.0;
  for (std::size_t i = 0; i < actual.size(); ++i) {
    if (actual[i] == 0.0) fail(Errc::zero_actual, "actual value is zero at index " + std::to_string(i));
    sum += std::abs(actual[i] - predicted[i]) / std::abs(actual[i]);
  }
  return 100.0 * sum / static_cast<double>(actual.size());
}

double mape(const HourlySeries& actual, const HourlySeries& predicted) {
  if (actual.start() != predicted.start()) fail(Errc::horizon_mismatch, "series start at different hours");
  return mape(actual.values(), predicted.values());
}

}  // namespace plf::temperature
