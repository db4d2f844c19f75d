#pragma once

#include <chrono>
#include <compare>
#include <cstdint>
#include <string>
#include <string_view>

namespace plf {

bool is_leap_year(int year) noexcept;
int days_in_year(int year) noexcept;

/// Timezone-naive wall-clock hour.
class Timestamp {
public:
  constexpr Timestamp() = default;

  static Timestamp from_civil(int year, int month, int day, int hour = 0);
  static constexpr Timestamp from_hours(std::int64_t hours) noexcept { return Timestamp(hours); }

  /// Accepts `YYYY-MM-DDTHH:00`, optionally with `:00` seconds or a space
  /// instead of `T`. Throws Error(malformed_row) on anything else.
  static Timestamp parse(std::string_view text);

  constexpr std::int64_t hours_since_epoch() const noexcept { return hours_; }

  std::chrono::year_month_day date() const noexcept;
  int year() const noexcept;
  int hour() const noexcept;  // 0..23
  /// Midnight of the same calendar day.
  Timestamp midnight() const noexcept;
  /// Days since 1970-01-01.
  std::int64_t day_number() const noexcept;

  std::string iso() const;

  constexpr Timestamp operator+(std::int64_t hours) const noexcept { return Timestamp(hours_ + hours); }
  constexpr Timestamp operator-(std::int64_t hours) const noexcept { return Timestamp(hours_ - hours); }
  constexpr std::int64_t operator-(Timestamp other) const noexcept { return hours_ - other.hours_; }

  constexpr auto operator<=>(const Timestamp&) const = default;

private:
  constexpr explicit Timestamp(std::int64_t hours) noexcept : hours_(hours) {}
  std::int64_t hours_ = 0;
};

/// Calendar decomposition of one hour. hour_of_day and period_of_week are
/// 1-based; day_of_week is ISO (Monday = 1).
struct CalendarStamp {
  int day_of_week = 1;      // 1..7
  int hour_of_day = 1;      // 1..24
  int period_of_week = 1;   // 1..168
  int day_of_year = 1;      // 1..366
  int year_length = 365;    // 365 or 366
  int year = 1970;
  int month = 1;
  int day = 1;
};

CalendarStamp calendar_stamp(Timestamp t) noexcept;

/// Same calendar date and hour `years` earlier; 29 February maps to 28 February
/// when the earlier year is not a leap year.
Timestamp same_date_years_earlier(Timestamp t, int years);

}  // namespace plf
