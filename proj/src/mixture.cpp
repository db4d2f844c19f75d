#include "mixture.hpp"

#include "plf/errors.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

namespace plf::kernel::detail {

namespace {

constexpr double kWindow = 9.0;  // Phi(-9) ~ 1e-19
constexpr int kBuckets = 64;
constexpr double kInvSqrt2 = 0.70710678118654752440;
constexpr double kInvSqrt2Pi = 0.39894228040143267794;

/// Phi and phi on [-9, 9] from Taylor expansions around nodes 1/256 apart:
///   phi(u + d) = sum_n phi(u) (-1)^n He_n(u) d^n / n!
/// truncated after n = 3; Phi integrates the same series. Absolute error is
/// below 1e-15 for Phi and 1e-12 for phi. Mixture windows are sorted, so
/// lookups walk the table in order.
class NormalTable {
public:
  NormalTable() {
    for (int k = 0; k < kNodes; ++k) {
      const double u = kLo + k * kStep;
      const double phi = kInvSqrt2Pi * std::exp(-0.5 * u * u);
      double he_prev = 1.0, he = u;  // He_0, He_1
      double factorial = 1.0;
      auto& node = nodes_[static_cast<std::size_t>(k)];
      node.cdf = 0.5 * std::erfc(-u * kInvSqrt2);
      for (int n = 0; n < kTerms; ++n) {
        const double he_n = n == 0 ? 1.0 : he;
        if (n > 0) factorial *= n;
        const double c = phi * ((n % 2 == 0) ? he_n : -he_n) / factorial;
        node.pdf[n] = c;
        node.cdf_terms[n] = c / (n + 1);
        if (n > 0) {
          const double next = u * he - n * he_prev;
          he_prev = he;
          he = next;
        }
      }
    }
  }

  void eval(double u, double& cdf, double& pdf) const noexcept {
    const double s = (u - kLo) * kInvStep;
    const int k = std::clamp(static_cast<int>(s + 0.5), 0, kNodes - 1);
    const double d = (s - k) * kStep;
    const auto& n = nodes_[static_cast<std::size_t>(k)];
    pdf = n.pdf[0] + d * (n.pdf[1] + d * (n.pdf[2] + d * n.pdf[3]));
    cdf = n.cdf + d * (n.cdf_terms[0] + d * (n.cdf_terms[1] + d * (n.cdf_terms[2] + d * n.cdf_terms[3])));
  }

private:
  static constexpr int kTerms = 4;
  static constexpr double kLo = -9.0;
  static constexpr double kStep = 1.0 / 256.0;
  static constexpr double kInvStep = 256.0;
  static constexpr int kNodes = 18 * 256 + 1;
  struct Node {
    double cdf;
    double pdf[kTerms];
    double cdf_terms[kTerms];
  };
  std::array<Node, kNodes> nodes_{};
};

const NormalTable& normal_table() {
  static const NormalTable table;
  return table;
}

}  // namespace

void SortedMixture::assign_sorted(std::span<const double> values, std::span<const double> weights, double bandwidth) {
  h_ = bandwidth;
  double heaviest = 0.0, total = 0.0;
  for (double w : weights) {
    heaviest = std::max(heaviest, w);
    total += w;
  }
  if (!(heaviest > 0.0) || !std::isfinite(total))
    fail(Errc::invalid_config, "mixture needs a positive finite total weight");

  // Drop the lightest components while their combined mass stays below
  // kPrunedMass of the total. Weights are bucketed by binary exponent
  // relative to the heaviest, and whole buckets go from the light end.
  std::array<double, kBuckets> bucket_mass{};
  const auto bucket_of = [&](double w) {
    if (w <= 0.0) return kBuckets - 1;
    int e = 0;
    std::frexp(w / heaviest, &e);
    return std::clamp(-e, 0, kBuckets - 1);
  };
  for (double w : weights) bucket_mass[static_cast<std::size_t>(bucket_of(w))] += w;
  int cutoff = kBuckets;  // buckets >= cutoff are dropped
  double dropped = 0.0;
  while (cutoff > 1 && dropped + bucket_mass[static_cast<std::size_t>(cutoff - 1)] <= kPrunedMass * total) {
    --cutoff;
    dropped += bucket_mass[static_cast<std::size_t>(cutoff)];
  }

  values_.clear();
  weights_.clear();
  double kept = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (bucket_of(weights[i]) >= cutoff) continue;
    values_.push_back(values[i]);
    weights_.push_back(weights[i]);
    kept += weights[i];
  }
  prefix_.resize(weights_.size() + 1);
  prefix_[0] = 0.0;
  for (std::size_t i = 0; i < weights_.size(); ++i) {
    weights_[i] /= kept;
    prefix_[i + 1] = prefix_[i] + weights_[i];
  }
}

double SortedMixture::cdf(double x) const noexcept {
  double c = 0.0, d = 0.0;
  cdf_pdf(x, c, d);
  return c;
}

double SortedMixture::pdf(double x) const noexcept {
  double c = 0.0, d = 0.0;
  cdf_pdf(x, c, d);
  return d;
}

void SortedMixture::cdf_pdf(double x, double& cdf, double& pdf) const noexcept {
  double slope = 0.0;
  evaluate(x, cdf, pdf, slope);
}

void SortedMixture::evaluate(double x, double& cdf, double& pdf, double& slope) const noexcept {
  const auto lo = std::lower_bound(values_.begin(), values_.end(), x - kWindow * h_) - values_.begin();
  const auto hi = std::upper_bound(values_.begin() + lo, values_.end(), x + kWindow * h_) - values_.begin();
  const auto& table = normal_table();
  const double inv_h = 1.0 / h_;
  double c = 0.0, d = 0.0, s = 0.0;
  for (auto i = lo; i < hi; ++i) {
    const double u = (x - values_[i]) * inv_h;
    double ci = 0.0, di = 0.0;
    table.eval(u, ci, di);
    const double w = weights_[i];
    c += w * ci;
    d += w * di;
    s -= w * u * di;
  }
  cdf = prefix_[lo] + c;
  pdf = d * inv_h;
  slope = s * inv_h * inv_h;
}

void SortedMixture::quantiles(std::span<const double> levels, std::span<double> out) const {
  if (values_.empty()) fail(Errc::bracket_failure, "empty mixture");
  const double lower = values_.front() - 12.0 * h_;
  const double upper = values_.back() + 12.0 * h_;
  if (cdf(lower) > levels.front() || cdf(upper) < levels.back())
    fail(Errc::bracket_failure, "CDF does not bracket the requested levels");

  double prev_x = lower;
  double prev_q = 0.0;
  double prev_pdf = 0.0, prev_slope = 0.0;
  for (std::size_t k = 0; k < levels.size(); ++k) {
    const double q = levels[k];
    double a = prev_x, b = upper;
    double x = 0.5 * (a + b);
    if (k > 0 && prev_pdf > 0.0) {
      // Second-order Taylor step of the quantile function: Q' = 1/f, Q'' = -f'/f^3.
      const double dq = q - prev_q;
      const double guess = prev_x + dq / prev_pdf - prev_slope * dq * dq / (2.0 * prev_pdf * prev_pdf * prev_pdf);
      if (guess > a && guess < b) x = guess;
    }
    double density = 0.0, slope = 0.0;
    for (int iter = 0; iter < 400; ++iter) {
      double cum = 0.0;
      evaluate(x, cum, density, slope);
      const double f = cum - q;
      if (std::abs(f) <= kCdfTolerance) break;
      if (f < 0.0) a = x; else b = x;
      if (b - a <= 4.0 * std::numeric_limits<double>::epsilon() * std::max(std::abs(a), std::abs(b))) {
        x = 0.5 * (a + b);
        double cum = 0.0;
        evaluate(x, cum, density, slope);
        break;
      }
      // Halley step, falling back to Newton and then to bisection.
      const double denom = 2.0 * density * density - f * slope;
      double step = denom > 0.0 ? x - 2.0 * f * density / denom : std::numeric_limits<double>::quiet_NaN();
      if (!(step > a && step < b)) step = density > 0.0 ? x - f / density : std::numeric_limits<double>::quiet_NaN();
      x = (step > a && step < b) ? step : 0.5 * (a + b);
    }
    out[k] = x;
    prev_x = x;
    prev_q = q;
    prev_pdf = density;
    prev_slope = slope;
  }
}

}  // namespace plf::kernel::detail
