#include "helpers.hpp"
#include "oracles.hpp"

#include "plf/kernel.hpp"
#include "plf/synthetic.hpp"

#include <doctest.h>

#include <cmath>
#include <map>
#include <numeric>
#include <random>

using namespace plf;
using namespace plf::kernel;

namespace {

/// load[i] = offset + i, so each value identifies its hour and value order is time order.
HourlySeries ramp(Timestamp start, std::size_t hours, double offset = 0.0) {
  std::vector<double> v(hours);
  std::iota(v.begin(), v.end(), offset);
  return HourlySeries(start, std::move(v), Unit::load);
}

std::map<double, double> weights_by_value(const DensityEstimate& d) {
  std::map<double, double> m;
  for (const auto& s : d.samples()) m[s.value] += s.weight;
  return m;
}

double weight_sum(const DensityEstimate& d) {
  double s = 0.0;
  for (const auto& x : d.samples()) s += x.weight;
  return s;
}

/// Standard normal quantile by bisection on erfc.
double normal_quantile(double q) {
  double lo = -10.0, hi = 10.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (0.5 * std::erfc(-mid / std::sqrt(2.0)) < q ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

CalendarStamp day_stamp(int year, int doy, int length) {
  CalendarStamp s;
  s.year = year;
  s.day_of_year = doy;
  s.year_length = length;
  return s;
}

const Timestamp kMonday = Timestamp::from_civil(2005, 1, 3);

}  // namespace

TEST_SUITE("kernel-forecasts") {

TEST_CASE("gaussian kernel values") {
  CHECK(gaussian_kernel(0.0) == doctest::Approx(0.398942280401).epsilon(1e-12));
  CHECK(gaussian_kernel(1.0) == doctest::Approx(0.241970724519).epsilon(1e-12));
  CHECK(gaussian_kernel(2.0) == doctest::Approx(0.0539909665132).epsilon(1e-12));
  for (double u : {0.3, 1.7, 4.2}) CHECK(gaussian_kernel(u) == gaussian_kernel(-u));
}

TEST_CASE("decay exponent examples") {
  CHECK(decay_exponent(day_stamp(2007, 100, 365), day_stamp(2006, 100, 365)) == 0);
  CHECK(decay_exponent(day_stamp(2007, 1, 365), day_stamp(2006, 365, 365)) == 1);
  CHECK(decay_exponent(day_stamp(2009, 100, 365), day_stamp(2008, 100, 366)) == 1);
  // Indicator inactive on or before day 28 of a leap year.
  CHECK(decay_exponent(day_stamp(2009, 20, 365), day_stamp(2008, 20, 366)) == 0);
}

TEST_CASE("decay exponent is symmetric in 365-day years") {
  bool ok = true;
  for (int d = 1; d <= 365; ++d) {
    for (int k = 0; k <= 182; ++k) {
      const int up = (d - 1 + k) % 365 + 1;
      const int down = ((d - 1 - k) % 365 + 365) % 365 + 1;
      const int a = decay_exponent(day_stamp(2007, d, 365), day_stamp(2006, up, 365));
      const int b = decay_exponent(day_stamp(2007, d, 365), day_stamp(2006, down, 365));
      ok = ok && a == b && a == k && a >= 0 && a <= 183;
    }
  }
  CHECK(ok);
}

TEST_CASE("kde plain") {
  KernelParams p;
  const std::vector<double> one{5.0};
  auto d = kde_plain(one, p);
  REQUIRE(d.samples().size() == 1);
  CHECK(d.samples()[0].weight == 1.0);

  const std::vector<double> three{1.0, 2.0, 3.0};
  d = kde_plain(three, p);
  for (const auto& s : d.samples()) CHECK(s.weight == doctest::Approx(1.0 / 3.0).epsilon(1e-15));

  p.h_x = 0.7;
  d = kde_plain(three, p);
  const double area = test::simpson([&](double x) { return d.pdf(x); }, -20.0, 25.0, 20000);
  CHECK(std::abs(area - 1.0) <= 1e-6);

  CHECK(test::thrown_code([&] { kde_plain(std::span<const double>{}, p); }) == Errc::empty_history);
}

TEST_CASE("kde-w with lambda 1 equals kde plain on the matching subset") {
  const auto series = ramp(kMonday, 24 * 7 * 9 + 5);
  const auto target = calendar_stamp(series.end() + 30);
  KernelParams p;
  p.h_x = 2.5;
  const auto d = kdew_density(series, target, p);
  std::vector<double> subset;
  for (std::size_t i = 0; i < series.size(); ++i)
    if (stamp(series, i).period_of_week == target.period_of_week) subset.push_back(series[i]);
  const auto plain = kde_plain(subset, p);
  REQUIRE(d.samples().size() == plain.samples().size());
  for (std::size_t i = 0; i < subset.size(); ++i) {
    CHECK(d.samples()[i].value == plain.samples()[i].value);
    CHECK(d.samples()[i].weight == plain.samples()[i].weight);
  }
  CHECK(d.bandwidth() == 2.5);
}

TEST_CASE("kde-w decay weights") {
  // Three weeks of history; the target sits one week after the last one, so
  // the matching observations are 21, 14 and 7 days back.
  const auto series = ramp(kMonday, 24 * 21);
  const auto target = calendar_stamp(kMonday + 24 * 21 + 5);
  KernelParams p;
  p.lambda = 0.95;
  const auto w = weights_by_value(kdew_density(series, target, p));
  REQUIRE(w.size() == 3);
  const double z = std::pow(0.95, 21) + std::pow(0.95, 14) + std::pow(0.95, 7);
  CHECK(w.at(5.0) == doctest::Approx(std::pow(0.95, 21) / z).epsilon(1e-13));
  CHECK(w.at(5.0 + 168) == doctest::Approx(std::pow(0.95, 14) / z).epsilon(1e-13));
  CHECK(w.at(5.0 + 336) == doctest::Approx(std::pow(0.95, 7) / z).epsilon(1e-13));

  // Decay wraps across the year boundary.
  const auto year = ramp(Timestamp::from_civil(2005, 1, 1), 24 * 365);
  const auto t2 = Timestamp::from_civil(2006, 12, 31, 13);
  const auto s2 = calendar_stamp(t2);
  const auto d2 = kdew_density(year, s2, p);
  const auto w2 = weights_by_value(d2);
  const auto at = [&](Timestamp t) { return w2.at(static_cast<double>(*year.index_of(t))); };
  // 2006-12-31 is a Sunday (day 365); matching Sundays 2005-12-25 (day 359)
  // and 2005-01-02 (day 2) have alphas 6 and 2.
  CHECK(at(Timestamp::from_civil(2005, 1, 2, 13)) / at(Timestamp::from_civil(2005, 12, 25, 13)) ==
        doctest::Approx(std::pow(0.95, 2 - 6)).epsilon(1e-12));
  CHECK(weight_sum(d2) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("kde-w hand-computed pair") {
  const auto series = ramp(Timestamp::from_civil(2005, 1, 3), 24 * 14);
  KernelParams p;
  p.lambda = 0.95;
  // 2006-01-02 is a Monday; matching hours are 2005-01-03 (alpha 1) and 2005-01-10 (alpha 8).
  const auto target = calendar_stamp(Timestamp::from_civil(2006, 1, 2, 0));
  const auto w = weights_by_value(kdew_density(series, target, p));
  REQUIRE(w.size() == 2);
  const double a = std::pow(0.95, 1), b = std::pow(0.95, 8);
  CHECK(w.at(0.0) == doctest::Approx(a / (a + b)).epsilon(1e-13));
  CHECK(w.at(168.0) == doctest::Approx(b / (a + b)).epsilon(1e-13));
}

TEST_CASE("kde-w without a matching period") {
  const auto series = ramp(kMonday, 10);
  const auto target = calendar_stamp(kMonday + 50);
  CHECK(test::thrown_code([&] { kdew_density(series, target, KernelParams{}); }) == Errc::no_matching_period);
}

TEST_CASE("ckd-w formula oracle") {
  const auto series = ramp(Timestamp::from_civil(2005, 3, 1, 7), 24 * 40);
  const auto target = calendar_stamp(series.end() + 17);
  KernelParams p;
  p.h_w = 3.0;
  p.lambda = 0.97;
  const auto w = weights_by_value(ckdw_density(series, target, p));
  std::vector<double> expect(series.size());
  double z = 0.0;
  for (std::size_t i = 0; i < series.size(); ++i) {
    const auto s = stamp(series, i);
    expect[i] = std::pow(p.lambda, decay_exponent(target, s)) *
                gaussian_kernel((s.period_of_week - target.period_of_week) / p.h_w);
    z += expect[i];
  }
  double worst = 0.0;
  for (std::size_t i = 0; i < series.size(); ++i) worst = std::max(worst, std::abs(w.at(series[i]) - expect[i] / z));
  CHECK(worst <= 1e-14);
}

TEST_CASE("ckd-w week periods 10, 11 and 168") {
  // One week from Monday 00:00 covers periods 1..168.
  const auto series = ramp(kMonday, 168);
  auto target = calendar_stamp(kMonday + 168 + 9);
  REQUIRE(target.period_of_week == 10);
  KernelParams p;
  const auto w = weights_by_value(ckdw_density(series, target, p));
  CHECK(w.at(10.0) / w.at(9.0) == doctest::Approx(gaussian_kernel(1.0) / gaussian_kernel(0.0)).epsilon(1e-12));
  CHECK(w.at(167.0) / w.at(9.0) == doctest::Approx(std::exp(-0.5 * 158.0 * 158.0)).epsilon(1e-12));

  KernelOptions circ;
  circ.circular_week = true;
  const auto wc = weights_by_value(ckdw_density(series, target, p, circ));
  // Period 168 is 10 hours away on the circle.
  CHECK(wc.at(167.0) / wc.at(9.0) == doctest::Approx(gaussian_kernel(10.0) / gaussian_kernel(0.0)).epsilon(1e-12));
}

TEST_CASE("ckd-w limits") {
  const auto series = ramp(kMonday, 24 * 7 * 4);
  const auto target = calendar_stamp(series.end() + 3);

  KernelParams narrow;
  narrow.h_w = 1e-3;
  narrow.lambda = 0.96;
  const auto a = weights_by_value(ckdw_density(series, target, narrow));
  const auto b = weights_by_value(kdew_density(series, target, narrow));
  for (const auto& [v, wt] : a) {
    const auto it = b.find(v);
    CHECK(std::abs(wt - (it == b.end() ? 0.0 : it->second)) <= 1e-14);
  }

  KernelParams wide;
  wide.h_w = 1e7;
  const auto u = ckdw_density(series, target, wide);
  for (const auto& s : u.samples()) CHECK(s.weight == doctest::Approx(1.0 / series.size()).epsilon(1e-9));
}

TEST_CASE("ckd-w history start option") {
  const auto series = ramp(Timestamp::from_civil(2007, 12, 1), 24 * 60);
  const auto target = calendar_stamp(series.end());
  KernelOptions o;
  o.ckdw_history_start = Timestamp::from_civil(2008, 1, 1);
  const auto d = ckdw_density(series, target, KernelParams{}, o);
  CHECK(d.samples().size() == series.size() - 24 * 31);
  CHECK(d.samples().front().value == 24.0 * 31);
}

TEST_CASE("ckd-t window and weights") {
  const auto start = Timestamp::from_civil(2004, 12, 1);
  const auto end = Timestamp::from_civil(2008, 1, 1);
  const auto n = static_cast<std::size_t>(end - start);
  const auto load = ramp(start, n);
  const double t_star = 40.0;
  std::vector<double> tv(n, t_star);
  KernelParams p;
  p.h_T = 2.0;
  // 2006-01-02 13:00 sits 2 h_T away from the forecast temperature.
  const auto marked = *load.index_of(Timestamp::from_civil(2006, 1, 2, 13));
  tv[marked] = t_star + 2.0 * p.h_T;
  const HourlySeries temps(start, tv, Unit::temperature);

  const auto target = calendar_stamp(Timestamp::from_civil(2008, 1, 2, 13));
  const auto d = ckdt_density(load, temps, target, t_star, p);
  // Dec 28 .. Jan 7 around 2005, 2006 and 2007; 2004's window precedes the data.
  CHECK(d.samples().size() == 33);
  const auto w = weights_by_value(d);
  const auto ref = *load.index_of(Timestamp::from_civil(2007, 1, 2, 13));
  CHECK(w.at(static_cast<double>(marked)) / w.at(static_cast<double>(ref)) ==
        doctest::Approx(0.0539909665 / 0.3989422804).epsilon(1e-9));
  for (const auto& [v, wt] : w) {
    const auto t = load.time_at(static_cast<std::size_t>(v));
    CHECK(t.hour() == 13);
    const auto md = t.date();
    const bool late_dec = unsigned(md.month()) == 12 && unsigned(md.day()) >= 28;
    const bool early_jan = unsigned(md.month()) == 1 && unsigned(md.day()) <= 7;
    CHECK((late_dec || early_jan));
    if (v != marked) CHECK(wt == doctest::Approx(w.at(static_cast<double>(ref))).epsilon(1e-15));
  }
}

TEST_CASE("ckd-t uniform weights and shift invariance") {
  const auto start = Timestamp::from_civil(2005, 1, 1);
  const auto n = std::size_t{24 * 365 * 3};
  const auto load = ramp(start, n);
  std::mt19937_64 rng(3);
  std::normal_distribution<double> g(50.0, 8.0);
  std::vector<double> tv(n), shifted(n), flat(n, 61.0);
  for (std::size_t i = 0; i < n; ++i) {
    tv[i] = g(rng);
    shifted[i] = tv[i] + 17.25;
  }
  const HourlySeries temps(start, tv, Unit::temperature), temps2(start, shifted, Unit::temperature),
      flat_temps(start, flat, Unit::temperature);
  const auto target = calendar_stamp(Timestamp::from_civil(2007, 6, 15, 4));
  KernelParams p;
  p.h_T = 3.0;

  const auto u = ckdt_density(load, flat_temps, target, 61.0, p);
  for (const auto& s : u.samples()) CHECK(s.weight == doctest::Approx(1.0 / u.samples().size()).epsilon(1e-14));
  CHECK(u.samples().size() == 22);

  const auto a = ckdt_density(load, temps, target, 55.0, p);
  const auto b = ckdt_density(load, temps2, target, 55.0 + 17.25, p);
  REQUIRE(a.samples().size() == b.samples().size());
  for (std::size_t i = 0; i < a.samples().size(); ++i)
    CHECK(std::abs(a.samples()[i].weight - b.samples()[i].weight) <= 1e-12);
  CHECK(weight_sum(a) == doctest::Approx(1.0).epsilon(1e-12));

  const auto early = calendar_stamp(Timestamp::from_civil(2005, 3, 1, 4));
  CHECK(test::thrown_code([&] { ckdt_density(load, temps, early, 55.0, p); }) == Errc::empty_window);
}

TEST_CASE("density quantile examples") {
  const std::vector<double> median{0.5}, upper{0.975};
  DensityEstimate one({{5.0, 1.0}}, 3.0);
  CHECK(density_quantiles(one, median)[0] == doctest::Approx(5.0).epsilon(1e-12));
  DensityEstimate std_normal({{0.0, 1.0}}, 1.0);
  CHECK(std::abs(density_quantiles(std_normal, upper)[0] - 1.959963984540054) <= 1e-9);
  DensityEstimate pair({{0.0, 0.5}, {10.0, 0.5}}, 0.1);
  CHECK(std::abs(density_quantiles(pair, median)[0] - 5.0) <= 1e-6);
}

TEST_CASE("density quantiles invert the cdf and are monotone") {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> val(-50.0, 300.0), wt(0.0, 1.0), bw(0.05, 20.0);
  std::uniform_int_distribution<int> count(1, 60);
  const auto& levels = quantile_levels();
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<WeightedSample> s(static_cast<std::size_t>(count(rng)));
    for (auto& x : s) x = {val(rng), wt(rng) + 1e-3};
    const DensityEstimate d(std::move(s), bw(rng));
    CHECK(weight_sum(d) == doctest::Approx(1.0).epsilon(1e-12));
    const auto x = density_quantiles(d, levels);
    for (std::size_t k = 0; k < levels.size(); ++k) {
      CHECK(std::abs(d.cdf(x[k]) - levels[k]) <= 1e-10);
      if (k > 0) CHECK(x[k] >= x[k - 1]);
    }
  }
}

TEST_CASE("density constructor rejects bad inputs") {
  CHECK(test::thrown_code([] { DensityEstimate({}, 1.0); }) == Errc::invalid_config);
  CHECK(test::thrown_code([] { DensityEstimate({{1.0, -1.0}}, 1.0); }) == Errc::invalid_config);
  CHECK(test::thrown_code([] { DensityEstimate({{1.0, 0.0}}, 1.0); }) == Errc::invalid_config);
  CHECK(test::thrown_code([] { DensityEstimate({{1.0, 1.0}}, 0.0); }) == Errc::invalid_config);
  const std::vector<double> bad{0.5, 0.4};
  CHECK(test::thrown_code([&] { density_quantiles(DensityEstimate({{1.0, 1.0}}, 1.0), bad); }) ==
        Errc::invalid_config);
}

TEST_CASE("forecast kernel shape and constant history") {
  const HourlySeries flat(kMonday, std::vector<double>(24 * 7 * 3, 120.0), Unit::load);
  KernelParams p;
  p.h_x = 4.0;
  const auto f = forecast_kernel(Method::kde_w, flat, nullptr, {}, flat.end(), 1, p);
  CHECK(f.hours() == 1);
  CHECK(f.values().size() == kQuantileCount);

  const auto g = forecast_kernel(Method::ckd_w, flat, nullptr, {}, flat.end(), 30, p);
  REQUIRE(g.hours() == 30);
  for (std::size_t h = 0; h < g.hours(); ++h) {
    CHECK(g.at(h, 49) == doctest::Approx(120.0).epsilon(1e-12));
    for (std::size_t k = 0; k < kQuantileCount; ++k)
      CHECK(std::abs(g.at(h, k) - (120.0 + p.h_x * normal_quantile(quantile_levels()[k]))) <= 1e-8);
  }
}

TEST_CASE("kde-w equals the ckd-w narrow-bandwidth limit") {
  SynthConfig c;
  c.start = kMonday;
  c.years = 2;
  const auto data = generate_synthetic(c, 5);
  const auto load = data.load.slice(kMonday, kMonday + 24 * 28);
  KernelParams p;
  p.h_x = 3.0;
  const auto kde = forecast_kernel(Method::kde_w, load, nullptr, {}, load.end(), 48, p);
  p.h_w = 1e-3;
  const auto ckd = forecast_kernel(Method::ckd_w, load, nullptr, {}, load.end(), 48, p);
  double worst = 0.0;
  for (std::size_t i = 0; i < kde.values().size(); ++i)
    worst = std::max(worst, std::abs(kde.values()[i] - ckd.values()[i]));
  CHECK(worst <= 1e-9);
}

TEST_CASE("forecast kernel errors") {
  const auto load = ramp(kMonday, 24 * 14);
  CHECK(test::thrown_code([&] {
          forecast_kernel(Method::kde_w, load, nullptr, {}, load.end(), 0, KernelParams{});
        }) == Errc::invalid_config);
  CHECK(test::thrown_code([&] {
          forecast_kernel(Method::ckd_t, load, nullptr, {}, load.end(), 1, KernelParams{});
        }) == Errc::invalid_config);
  KernelParams bad;
  bad.lambda = 0.0;
  CHECK(test::thrown_code([&] { forecast_kernel(Method::kde_w, load, nullptr, {}, load.end(), 1, bad); }) ==
        Errc::invalid_config);
}

TEST_CASE("validation windows") {
  const auto h = Timestamp::from_civil(2008, 3, 1);
  const auto w = last_week_before(h);
  CHECK(w.end == h);
  CHECK(w.end - w.start == 168);
  const auto m = month_before(Timestamp::from_civil(2008, 3, 15));
  CHECK(m.start == Timestamp::from_civil(2008, 2, 1));
  CHECK(m.end == Timestamp::from_civil(2008, 3, 1));
  const auto g = default_lambda_grid();
  REQUIRE(g.size() == 9);
  CHECK(g.front() == doctest::Approx(0.92));
  CHECK(g.back() == 1.0);
}

TEST_CASE("cross validation basics") {
  SynthConfig c;
  c.years = 2;
  const auto data = generate_synthetic(c, 8);
  const auto horizon = Timestamp::from_civil(2005, 6, 1);
  const auto window = last_week_before(horizon);
  const std::vector<double> single{0.95};
  const auto r = cross_validate_kernel(Method::kde_w, data.load, nullptr, window, single);
  CHECK(r.params.lambda == 0.95);
  REQUIRE(r.trials.size() == 1);
  CHECK(r.loss == doctest::Approx(validation_loss(Method::kde_w, data.load, nullptr, window, r.params)));

  const ValidationWindow empty{window.start, window.start};
  CHECK(test::thrown_code([&] { cross_validate_kernel(Method::kde_w, data.load, nullptr, empty, single); }) ==
        Errc::window_outside_history);
  const ValidationWindow outside{data.load.end(), data.load.end() + 168};
  CHECK(test::thrown_code([&] { cross_validate_kernel(Method::kde_w, data.load, nullptr, outside, single); }) ==
        Errc::window_outside_history);
}

TEST_CASE("cross validation picks lambda 1 without drift") {
  SynthConfig c;
  c.years = 2;
  c.load_trend_per_year = 0.0;
  c.load_annual_amp = 0.0;
  c.heat_slope = 0.0;
  c.cool_slope = 0.0;
  const auto horizon = Timestamp::from_civil(2006, 12, 1);
  const auto grid = default_lambda_grid();
  int ones = 0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const auto data = generate_synthetic(c, seed);
    const auto r = cross_validate_kernel(Method::kde_w, data.load, nullptr, last_week_before(horizon), grid);
    if (r.params.lambda == 1.0) ++ones;
  }
  CHECK(ones >= 16);
}

}  // TEST_SUITE
