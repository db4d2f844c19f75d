#pragma once

#include "plf/forecast.hpp"
#include "plf/series.hpp"

#include <array>
#include <filesystem>
#include <span>
#include <vector>

namespace plf::hybrid {

/// Horizon period of a 0-based hour: 1 = day 1, 2 = days 2-7, 3 = days 8-14,
/// 4 = days 15-21, 5 = day 22 onward.
int period_of_hour(std::size_t hour) noexcept;

/// w(tau) for tau = 2..5, each in [0, 1].
class HybridWeights {
public:
  HybridWeights() { weights_.fill(1.0); }
  explicit HybridWeights(std::array<double, 4> w);

  double at(int tau) const;
  void set(int tau, double w);

  bool operator==(const HybridWeights&) const = default;

private:
  std::array<double, 4> weights_{};
};

/// CKD-W with the CKD-T forecast spliced into day 1.
QuantileForecast mix1(const QuantileForecast& ckdw, const QuantileForecast& ckdt_day1);
/// As mix1 but QR from day 8 on.
QuantileForecast mix2(const QuantileForecast& ckdw, const QuantileForecast& ckdt_day1, const QuantileForecast& qr);

/// Day 1 from CKD-T; afterwards w(tau) * CKD-W + (1 - w(tau)) * QR per quantile.
QuantileForecast blend(const QuantileForecast& ckdw, const QuantileForecast& ckdt_day1,
                       const QuantileForecast& qr, const HybridWeights& weights);
/// blend() followed by row sorting.
QuantileForecast hybrid(const QuantileForecast& ckdw, const QuantileForecast& ckdt_day1,
                        const QuantileForecast& qr, const HybridWeights& weights);

struct PastTask {
  QuantileForecast ckdw;
  QuantileForecast qr;
  HourlySeries actuals;
};

std::vector<double> default_weight_grid();  // 0, 0.05, ..., 1

/// Per task and period the grid weight with the lowest pinball (ties to the
/// smaller weight); w(tau) is the mean over tasks. Periods no task covers get
/// 0.5. Throws no_tasks.
HybridWeights train_weights(std::span<const PastTask> tasks, std::span<const double> grid);

/// `tau,weight` text file.
void write_weights(const std::filesystem::path& path, const HybridWeights& weights);
/// Throws weights_missing or malformed_row.
HybridWeights read_weights(const std::filesystem::path& path);

}  // namespace plf::hybrid
