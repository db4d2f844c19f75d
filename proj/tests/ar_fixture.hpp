#pragma once

// Noise-free data that satisfies the temperature model exactly while keeping
// the 38-column design at full rank.

#include "plf/series.hpp"
#include "plf/temperature_model.hpp"

#include <complex>
#include <numbers>
#include <random>
#include <vector>

namespace plf::test {

/// Lag coefficients of prod_r (1 - z_r B) with 25 roots of modulus `radius`
/// spread around the circle (jittered so no coefficient is zero). Roots close
/// to the unit circle keep the homogeneous modes alive for thousands of hours,
/// which is what separates the lag columns from the deterministic ones.
inline std::vector<double> near_unit_root_lags(double radius, std::uint64_t seed, int lags = 25) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> jitter(-0.08, 0.08);
  std::vector<std::complex<double>> roots;
  roots.emplace_back(radius, 0.0);
  for (int k = 1; 2 * k < lags + 1; ++k) {
    const double angle = 2.0 * std::numbers::pi * (k + jitter(rng)) / lags;
    roots.push_back(std::polar(radius, angle));
    roots.push_back(std::polar(radius, -angle));
  }
  std::vector<std::complex<double>> poly{1.0};
  for (const auto& r : roots) {
    std::vector<std::complex<double>> next(poly.size() + 1, 0.0);
    for (std::size_t i = 0; i < poly.size(); ++i) {
      next[i] += poly[i];
      next[i + 1] -= r * poly[i];
    }
    poly.swap(next);
  }
  std::vector<double> alpha(static_cast<std::size_t>(lags));
  for (int k = 1; k <= lags; ++k) alpha[static_cast<std::size_t>(k - 1)] = -poly[static_cast<std::size_t>(k)].real();
  return alpha;
}

inline temperature::TemperatureModelParams reference_params(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  temperature::TemperatureModelParams p;
  p.beta0 = 0.8;
  p.beta1 = 2e-6;
  for (int i = 0; i < p.spec.daily_harmonics; ++i) {
    p.gamma.push_back(0.4 * u(rng));
    p.delta.push_back(0.4 * u(rng));
  }
  for (int m = 0; m < p.spec.annual_harmonics; ++m) p.psi.push_back(0.2 * u(rng));
  p.alpha = near_unit_root_lags(0.9995, seed);
  return p;
}

/// Exact model trajectory written without the library: random seed hours,
/// then T_j = row_j . theta for every later hour.
inline HourlySeries reference_series(const temperature::TemperatureModelParams& p, Timestamp start,
                                     std::size_t hours, std::uint64_t seed) {
  const auto& s = p.spec;
  std::mt19937_64 rng(seed ^ 0x5eedULL);
  std::normal_distribution<double> g(55.0, 10.0);
  std::vector<double> t(hours);
  const auto lags = static_cast<std::size_t>(s.lags);
  for (std::size_t i = 0; i < lags; ++i) t[i] = g(rng);
  const double two_pi = 2.0 * std::numbers::pi;
  for (std::size_t i = lags; i < hours; ++i) {
    const auto j = (start - s.anchor) + static_cast<std::int64_t>(i);
    const double d = static_cast<double>(j % 24);
    double v = p.beta0 + p.beta1 * static_cast<double>(j);
    for (int k = 1; k <= s.daily_harmonics; ++k)
      v += p.gamma[k - 1] * std::sin(two_pi * k * d / 24.0) + p.delta[k - 1] * std::cos(two_pi * k * d / 24.0);
    for (int m = 1; m <= s.annual_harmonics; ++m)
      v += p.psi[m - 1] * std::sin(two_pi * m * (static_cast<double>(j) / 24.0 + s.annual_phase_days) / 365.0);
    for (std::size_t l = 1; l <= lags; ++l) v += p.alpha[l - 1] * t[i - l];
    t[i] = v;
  }
  return HourlySeries(start, std::move(t), Unit::temperature);
}

}  // namespace plf::test
