#pragma once

#include <span>
#include <vector>

namespace plf::kernel::detail {

/// Equal-bandwidth Gaussian mixture over value-sorted components with prefix
/// weight sums, so CDF evaluation only touches components within 9 bandwidths.
class SortedMixture {
public:
  /// `values` ascending; weights >= 0 with positive sum. The lightest
  /// components are dropped while their mass stays within kPrunedMass of the
  /// total, so CDFs differ from the full mixture by at most that much.
  void assign_sorted(std::span<const double> values, std::span<const double> weights, double bandwidth);

  double cdf(double x) const noexcept;
  double pdf(double x) const noexcept;
  /// Both at once in a single pass over the window.
  void cdf_pdf(double x, double& cdf, double& pdf) const noexcept;
  /// Also returns the density's derivative.
  void evaluate(double x, double& cdf, double& pdf, double& slope) const noexcept;

  /// Bracketed Newton iteration (bisection fallback) on [min - 12h, max + 12h]
  /// to |CDF - q| <= kCdfTolerance. `levels` strictly increasing.
  void quantiles(std::span<const double> levels, std::span<double> out) const;

  std::size_t size() const noexcept { return values_.size(); }

private:
  std::vector<double> values_;
  std::vector<double> weights_;
  std::vector<double> prefix_;  // prefix_[i] = sum of weights_[0..i)
  double h_ = 1.0;
};

inline constexpr double kPrunedMass = 1e-12;
/// Leaves room for pruning and rounding under the public 1e-10 guarantee.
inline constexpr double kCdfTolerance = 5e-11;

}  // namespace plf::kernel::detail
