#include "plf/calendar.hpp"

#include "plf/errors.hpp"

#include <charconv>
#include <cstdio>

namespace plf {

namespace {

using namespace std::chrono;

constexpr std::int64_t kHoursPerDay = 24;

std::int64_t floor_div(std::int64_t a, std::int64_t b) noexcept {
  std::int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

bool parse_int(std::string_view text, int& out) {
  if (text.empty()) return false;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
  return ec == std::errc() && ptr == text.data() + text.size();
}

}  // namespace

bool is_leap_year(int y) noexcept { return year{y}.is_leap(); }

int days_in_year(int y) noexcept { return is_leap_year(y) ? 366 : 365; }

Timestamp Timestamp::from_civil(int y, int m, int d, int hour) {
  const year_month_day ymd{std::chrono::year{y}, std::chrono::month{static_cast<unsigned>(m)}, std::chrono::day{static_cast<unsigned>(d)}};
  if (!ymd.ok() || hour < 0 || hour > 23) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%04d-%02d-%02dT%02d", y, m, d, hour);
    fail(Errc::malformed_row, std::string("invalid calendar hour ") + buf);
  }
  const auto days = sys_days{ymd}.time_since_epoch().count();
  return Timestamp(days * kHoursPerDay + hour);
}

Timestamp Timestamp::parse(std::string_view text) {
  const auto bad = [&] { fail(Errc::malformed_row, "bad timestamp '" + std::string(text) + "'"); };
  // YYYY-MM-DDTHH:MM[:SS]
  if (text.size() != 16 && text.size() != 19) bad();
  if (text[4] != '-' || text[7] != '-' || (text[10] != 'T' && text[10] != ' ') || text[13] != ':') bad();
  int y = 0, mo = 0, d = 0, h = 0, mi = 0, s = 0;
  if (!parse_int(text.substr(0, 4), y) || !parse_int(text.substr(5, 2), mo) || !parse_int(text.substr(8, 2), d) ||
      !parse_int(text.substr(11, 2), h) || !parse_int(text.substr(14, 2), mi))
    bad();
  if (text.size() == 19 && (text[16] != ':' || !parse_int(text.substr(17, 2), s))) bad();
  if (mi != 0 || s != 0) bad();
  return from_civil(y, mo, d, h);
}

year_month_day Timestamp::date() const noexcept { return year_month_day{sys_days{days{day_number()}}}; }

std::int64_t Timestamp::day_number() const noexcept { return floor_div(hours_, kHoursPerDay); }

int Timestamp::year() const noexcept { return static_cast<int>(date().year()); }

int Timestamp::hour() const noexcept { return static_cast<int>(hours_ - day_number() * kHoursPerDay); }

Timestamp Timestamp::midnight() const noexcept { return Timestamp(day_number() * kHoursPerDay); }

std::string Timestamp::iso() const {
  const auto ymd = date();
  char buf[32];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:00", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()), hour());
  return buf;
}

CalendarStamp calendar_stamp(Timestamp t) noexcept {
  const auto dn = t.day_number();
  const sys_days sd{days{dn}};
  const year_month_day ymd{sd};
  const weekday wd{sd};

  CalendarStamp s;
  s.year = static_cast<int>(ymd.year());
  s.month = static_cast<int>(static_cast<unsigned>(ymd.month()));
  s.day = static_cast<int>(static_cast<unsigned>(ymd.day()));
  s.day_of_week = static_cast<int>(wd.iso_encoding());
  s.hour_of_day = t.hour() + 1;
  s.period_of_week = 24 * (s.day_of_week - 1) + s.hour_of_day;
  const auto jan1 = sys_days{ymd.year() / January / 1};
  s.day_of_year = static_cast<int>((sd - jan1).count()) + 1;
  s.year_length = days_in_year(s.year);
  return s;
}

Timestamp same_date_years_earlier(Timestamp t, int years) {
  const auto ymd = t.date();
  const int y = static_cast<int>(ymd.year()) - years;
  int m = static_cast<int>(static_cast<unsigned>(ymd.month()));
  int d = static_cast<int>(static_cast<unsigned>(ymd.day()));
  if (m == 2 && d == 29 && !is_leap_year(y)) d = 28;
  return Timestamp::from_civil(y, m, d, t.hour());
}

}  // namespace plf
