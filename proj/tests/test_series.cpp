#include "helpers.hpp"

#include "plf/calendar.hpp"
#include "plf/csv_io.hpp"
#include "plf/errors.hpp"
#include "plf/series.hpp"
#include "plf/synthetic.hpp"

#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

using namespace plf;
using test::TempDir;
using test::write_text;

namespace {

Errc error_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an Error");
  return Errc::invalid_config;
}

std::string temperature_row(const std::string& ts, const std::vector<double>& v) {
  std::ostringstream out;
  out << ts;
  for (double x : v) out << ',' << x;
  out << '\n';
  return out.str();
}

}  // namespace

TEST_SUITE("timeseries-core") {

TEST_CASE("ingest three rows verbatim") {
  TempDir dir("ingest");
  write_text(dir / "l.csv", "timestamp,load\n2005-01-01T00:00,1\n2005-01-01T01:00,2\n2005-01-01T02:00,3\n");
  const auto s = ingest_load_csv(dir / "l.csv");
  REQUIRE(s.size() == 3);
  CHECK(s[0] == 1.0);
  CHECK(s[1] == 2.0);
  CHECK(s[2] == 3.0);
  CHECK(s.start() == Timestamp::from_civil(2005, 1, 1));
  CHECK(s.unit() == Unit::load);
}

TEST_CASE("two missing hours are interpolated") {
  TempDir dir("gap");
  write_text(dir / "l.csv", "timestamp,load\n2005-01-01T00:00,1\n2005-01-01T03:00,4\n");
  const auto s = ingest_load_csv(dir / "l.csv");
  REQUIRE(s.size() == 4);
  for (std::size_t i = 0; i < 4; ++i) CHECK(s[i] == doctest::Approx(1.0 + static_cast<double>(i)).epsilon(1e-15));
}

TEST_CASE("nine missing hours are too many") {
  TempDir dir("biggap");
  write_text(dir / "l.csv", "timestamp,load\n2005-01-01T00:00,1\n2005-01-01T10:00,4\n");
  CHECK(error_of([&] { ingest_load_csv(dir / "l.csv"); }) == Errc::gap_too_large);
}

TEST_CASE("malformed and empty load files") {
  TempDir dir("bad");
  write_text(dir / "a.csv", "timestamp,load\n2005-01-01T00:00,abc\n");
  CHECK(error_of([&] { ingest_load_csv(dir / "a.csv"); }) == Errc::malformed_row);
  write_text(dir / "b.csv", "timestamp,load\n2005-13-01T00:00,1\n");
  CHECK(error_of([&] { ingest_load_csv(dir / "b.csv"); }) == Errc::malformed_row);
  write_text(dir / "c.csv", "timestamp,load\n");
  CHECK(error_of([&] { ingest_load_csv(dir / "c.csv"); }) == Errc::empty_file);
  CHECK(error_of([&] { ingest_load_csv(dir / "missing.csv"); }) == Errc::io_error);
}

TEST_CASE("interpolated points lie on the bracketing line") {
  TempDir dir("line");
  // Observations at hours 0, 4, 5, 11 with gaps of 3 and 5 hours.
  write_text(dir / "l.csv",
             "timestamp,load\n2005-01-01T00:00,10\n2005-01-01T04:00,30\n2005-01-01T05:00,-2\n2005-01-01T11:00,40\n");
  const auto s = ingest_load_csv(dir / "l.csv");
  REQUIRE(s.size() == 12);
  const auto on_line = [&](std::size_t a, std::size_t b) {
    for (std::size_t i = a; i <= b; ++i) {
      const double expected = s[a] + (s[b] - s[a]) * static_cast<double>(i - a) / static_cast<double>(b - a);
      CHECK(s[i] == doctest::Approx(expected).epsilon(1e-13));
    }
  };
  CHECK(s[0] == 10.0);
  CHECK(s[4] == 30.0);
  CHECK(s[5] == -2.0);
  CHECK(s[11] == 40.0);
  on_line(0, 4);
  on_line(5, 11);
}

TEST_CASE("temperature ingestion") {
  TempDir dir("temps");
  std::string header = "timestamp";
  for (int s = 1; s <= 25; ++s) header += ",w" + std::to_string(s);
  header += '\n';

  SUBCASE("all fifty") {
    write_text(dir / "t.csv", header + temperature_row("2005-01-01T00:00", std::vector<double>(25, 50.0)) +
                                  temperature_row("2005-01-01T01:00", std::vector<double>(25, 50.0)));
    const auto table = ingest_temperature_csv(dir / "t.csv");
    REQUIRE(table.size() == 2);
    REQUIRE(table.station_count() == 25);
    for (std::size_t s = 0; s < 25; ++s)
      for (double v : table.station(s)) CHECK(v == 50.0);
  }
  SUBCASE("24 columns") {
    write_text(dir / "t.csv", header + temperature_row("2005-01-01T00:00", std::vector<double>(24, 50.0)));
    CHECK(error_of([&] { ingest_temperature_csv(dir / "t.csv"); }) == Errc::wrong_column_count);
  }
  SUBCASE("one cold station") {
    std::vector<double> row(25, 70.0);
    row[0] = 30.0;
    write_text(dir / "t.csv", header + temperature_row("2005-01-01T00:00", row));
    const auto mean = mean_temperature(ingest_temperature_csv(dir / "t.csv"));
    CHECK(mean[0] == doctest::Approx(68.4).epsilon(1e-14));
    CHECK(mean.unit() == Unit::temperature);
  }
  SUBCASE("gap policy per station") {
    std::vector<double> a(25, 10.0), b(25, 40.0);
    write_text(dir / "t.csv", header + temperature_row("2005-01-01T00:00", a) + temperature_row("2005-01-01T03:00", b));
    const auto table = ingest_temperature_csv(dir / "t.csv");
    REQUIRE(table.size() == 4);
    CHECK(table.station(7)[1] == doctest::Approx(20.0));
    CHECK(table.station(24)[2] == doctest::Approx(30.0));
  }
}

TEST_CASE("mean temperature") {
  const auto t0 = Timestamp::from_civil(2005, 1, 1);
  SUBCASE("all sixty") {
    const StationTable table(t0, std::vector<std::vector<double>>(25, std::vector<double>(5, 60.0)));
    const auto mean = mean_temperature(table);
    for (double v : mean.values()) CHECK(v == 60.0);
  }
  SUBCASE("one through twenty-five") {
    std::vector<std::vector<double>> st;
    for (int s = 1; s <= 25; ++s) st.push_back({static_cast<double>(s)});
    CHECK(mean_temperature(StationTable(t0, st))[0] == 13.0);
  }
  SUBCASE("random table against a row sum") {
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> u(-20.0, 100.0);
    std::vector<std::vector<double>> st(25, std::vector<double>(50));
    for (auto& s : st)
      for (auto& v : s) v = u(rng);
    const auto mean = mean_temperature(StationTable(t0, st));
    for (std::size_t i = 0; i < 50; ++i) {
      long double sum = 0.0L;
      for (const auto& s : st) sum += s[i];
      CHECK(mean[i] == doctest::Approx(static_cast<double>(sum / 25.0L)).epsilon(1e-13));
    }
  }
}

TEST_CASE("calendar stamps") {
  const auto jan1 = Timestamp::from_civil(2005, 1, 1);
  const HourlySeries year(jan1, std::vector<double>(8760, 1.0), Unit::load);
  auto c = stamp(year, 0);
  CHECK(c.day_of_year == 1);
  CHECK(c.year_length == 365);
  CHECK(c.hour_of_day == 1);
  c = stamp(year, 8759);
  CHECK(c.day_of_year == 365);
  CHECK(c.hour_of_day == 24);
  CHECK_THROWS_AS(stamp(year, 8760), Error);

  const HourlySeries leap(Timestamp::from_civil(2008, 2, 28, 23), std::vector<double>(2, 1.0), Unit::load);
  c = stamp(leap, 1);
  CHECK(c.day_of_year == 60);
  CHECK(c.year_length == 366);
  CHECK(c.month == 2);
  CHECK(c.day == 29);

  // 2005-01-03 is a Monday.
  c = calendar_stamp(Timestamp::from_civil(2005, 1, 3, 0));
  CHECK(c.day_of_week == 1);
  CHECK(c.period_of_week == 1);
  c = calendar_stamp(Timestamp::from_civil(2005, 1, 9, 23));
  CHECK(c.period_of_week == 168);
}

TEST_CASE("stamp walk over four years") {
  const auto start = Timestamp::from_civil(2005, 1, 1);
  const std::size_t hours = 4 * 8760 + 24;
  auto prev = calendar_stamp(start);
  // Independent day counter.
  int expected_year = 2005, expected_doy = 1;
  for (std::size_t i = 1; i < hours; ++i) {
    const auto t = start + static_cast<std::int64_t>(i);
    const auto c = calendar_stamp(t);
    CHECK_EQ(c.period_of_week, prev.period_of_week % 168 + 1);
    CHECK_EQ(c.period_of_week, 24 * (c.day_of_week - 1) + c.hour_of_day);
    if (i % 24 == 0) {
      ++expected_doy;
      const int len = (expected_year % 4 == 0 && (expected_year % 100 != 0 || expected_year % 400 == 0)) ? 366 : 365;
      if (expected_doy > len) {
        expected_doy = 1;
        ++expected_year;
      }
    }
    CHECK_EQ(c.day_of_year, expected_doy);
    CHECK_EQ(c.year, expected_year);
    CHECK_EQ(c.year_length, is_leap_year(expected_year) ? 366 : 365);
    prev = c;
  }
}

TEST_CASE("timestamp parsing") {
  CHECK(Timestamp::parse("2008-02-29T13:00") == Timestamp::from_civil(2008, 2, 29, 13));
  CHECK(Timestamp::parse("2008-02-29 13:00:00") == Timestamp::from_civil(2008, 2, 29, 13));
  CHECK_THROWS_AS(Timestamp::parse("2007-02-29T00:00"), Error);
  CHECK_THROWS_AS(Timestamp::parse("2008-02-01T00:30"), Error);
  CHECK(Timestamp::from_civil(2011, 6, 1, 3).iso() == "2011-06-01T03:00");
  CHECK(same_date_years_earlier(Timestamp::from_civil(2012, 2, 29, 5), 1) == Timestamp::from_civil(2011, 2, 28, 5));
}

TEST_CASE("synthetic generator") {
  SynthConfig cfg;
  cfg.years = 2;
  const auto a = generate_synthetic(cfg, 42);
  const auto b = generate_synthetic(cfg, 42);
  const auto c = generate_synthetic(cfg, 43);
  CHECK(a.load.size() == 17520);  // 2005 + 2006, no leap day
  CHECK(std::equal(a.load.values().begin(), a.load.values().end(), b.load.values().begin()));
  bool differs = false;
  for (std::size_t i = 0; i < a.load.size() && !differs; ++i) differs = a.load[i] != c.load[i];
  CHECK(differs);

  SUBCASE("zero noise follows the closed form") {
    cfg.noise_scale = 0.0;
    const auto z = generate_synthetic(cfg, 7);
    for (std::size_t i = 0; i < z.load.size(); i += 97) {
      const auto t = z.load.time_at(i);
      double mean_temp = 0.0;
      for (double off : z.station_offsets) mean_temp += synthetic_temperature_mean(cfg, t, off);
      mean_temp /= 25.0;
      CHECK(z.load[i] == doctest::Approx(synthetic_load_mean(cfg, t, mean_temp)).epsilon(1e-12));
      CHECK(z.temps.station(3)[i] == doctest::Approx(synthetic_temperature_mean(cfg, t, z.station_offsets[3])));
    }
  }
  SUBCASE("leap coverage") {
    cfg.start = Timestamp::from_civil(2007, 1, 1);
    CHECK(generate_synthetic(cfg, 1).load.size() == 17520 + 24);
  }
  SUBCASE("invalid config") {
    cfg.years = 1;
    CHECK(error_of([&] { generate_synthetic(cfg, 1); }) == Errc::invalid_config);
    cfg.years = 2;
    cfg.noise_scale = -1.0;
    CHECK(error_of([&] { generate_synthetic(cfg, 1); }) == Errc::invalid_config);
  }
}

TEST_CASE("csv round trip keeps every digit") {
  TempDir dir("round");
  SynthConfig cfg;
  cfg.years = 2;
  const auto data = generate_synthetic(cfg, 5);
  write_load_csv(dir / "load.csv", data.load);
  write_temperature_csv(dir / "temps.csv", data.temps);
  const auto load = ingest_load_csv(dir / "load.csv");
  const auto temps = ingest_temperature_csv(dir / "temps.csv");
  REQUIRE(load.size() == data.load.size());
  for (std::size_t i = 0; i < load.size(); ++i) REQUIRE(std::abs(load[i] - data.load[i]) <= 1e-12 * std::abs(data.load[i]));
  for (std::size_t i = 0; i < temps.size(); i += 101) CHECK(temps.station(11)[i] == data.temps.station(11)[i]);
}

TEST_CASE("series slicing") {
  const auto t0 = Timestamp::from_civil(2005, 1, 1);
  const HourlySeries s(t0, {1, 2, 3, 4, 5}, Unit::load);
  const auto mid = s.slice(t0 + 1, t0 + 3);
  CHECK(mid.size() == 2);
  CHECK(mid[0] == 2.0);
  CHECK(s.before(t0 + 2).size() == 2);
  CHECK(error_of([&] { s.slice(t0 + 3, t0 + 9); }) == Errc::index_out_of_range);
  CHECK(error_of([&] { s.before(t0); }) == Errc::empty_history);
  CHECK(error_of([&] { HourlySeries(t0, {}, Unit::load); }) == Errc::invalid_config);
  CHECK(error_of([&] { HourlySeries(t0, {1.0, NAN}, Unit::load); }) == Errc::invalid_config);
}

}  // TEST_SUITE
