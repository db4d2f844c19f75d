#pragma once

#include "mixture.hpp"
#include "plf/kernel.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace plf::kernel::detail {

/// Calendar facts for every index of an hourly series.
struct SeriesCalendar {
  std::vector<std::int16_t> period;       // 1..168
  std::vector<std::int16_t> day_of_year;  // 1..366
  std::vector<std::int16_t> year_length;  // 365, 366
};

SeriesCalendar series_calendar(Timestamp start, std::size_t n);

/// Load history [0, usable) of `load` plus whatever a method needs to gather
/// its components for one target hour.
struct GatherContext {
  const HourlySeries* load = nullptr;
  const SeriesCalendar* calendar = nullptr;
  std::size_t usable = 0;
  const HourlySeries* temps = nullptr;
};

/// Components of one target hour, sorted by value. The log-weight of
/// component i is decay[i] * log(lambda) - 0.5 * (offset[i] / h)^2 with h the
/// method's second bandwidth; empty vectors contribute zero.
struct HourCase {
  std::vector<double> values;
  std::vector<double> decay;
  std::vector<double> offset;
};

HourCase gather(Method method, const GatherContext& context, const CalendarStamp& target,
                double forecast_temp, const KernelOptions& options);

/// Unnormalized weights (largest = 1) in case order.
void case_weights(Method method, const HourCase& hour, const KernelParams& params, std::vector<double>& out);

/// 99 quantiles of the hour's mixture into `out`.
void case_quantiles(Method method, const HourCase& hour, const KernelParams& params, SortedMixture& mixture,
                    std::vector<double>& scratch, std::span<double> out);

}  // namespace plf::kernel::detail
