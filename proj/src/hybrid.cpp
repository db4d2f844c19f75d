#include "plf/hybrid.hpp"

#include "plf/errors.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <limits>
#include <string>

namespace plf::hybrid {

namespace {

void check_weight(double w) {
  if (!(w >= 0.0 && w <= 1.0)) fail(Errc::invalid_config, "hybrid weights must lie in [0, 1]");
}

void check_tau(int tau) {
  if (tau < 2 || tau > 5) fail(Errc::invalid_config, "hybrid weights exist for periods 2..5 only");
}

void check_day1(const QuantileForecast& ckdw, const QuantileForecast& ckdt_day1) {
  if (ckdt_day1.start() != ckdw.start() || ckdt_day1.hours() != std::min<std::size_t>(24, ckdw.hours()))
    fail(Errc::horizon_mismatch, "CKD-T forecast must cover exactly the first day of the horizon");
}

void check_aligned(const QuantileForecast& a, const QuantileForecast& b) {
  if (a.start() != b.start() || a.hours() != b.hours())
    fail(Errc::horizon_mismatch, "forecasts cover different horizons");
}

void copy_row(const QuantileForecast& from, std::size_t hour, QuantileForecast& to) {
  const auto src = from.row(hour);
  std::copy(src.begin(), src.end(), to.row(hour).begin());
}

}  // namespace

int period_of_hour(std::size_t hour) noexcept {
  const auto day = hour / 24 + 1;
  if (day == 1) return 1;
  if (day <= 7) return 2;
  if (day <= 14) return 3;
  if (day <= 21) return 4;
  return 5;
}

HybridWeights::HybridWeights(std::array<double, 4> w) : weights_(w) {
  for (double v : weights_) check_weight(v);
}

double HybridWeights::at(int tau) const {
  check_tau(tau);
  return weights_[static_cast<std::size_t>(tau - 2)];
}

void HybridWeights::set(int tau, double w) {
  check_tau(tau);
  check_weight(w);
  weights_[static_cast<std::size_t>(tau - 2)] = w;
}

QuantileForecast mix1(const QuantileForecast& ckdw, const QuantileForecast& ckdt_day1) {
  check_day1(ckdw, ckdt_day1);
  QuantileForecast out = ckdw;
  for (std::size_t h = 0; h < ckdt_day1.hours(); ++h) copy_row(ckdt_day1, h, out);
  return out;
}

QuantileForecast mix2(const QuantileForecast& ckdw, const QuantileForecast& ckdt_day1, const QuantileForecast& qr) {
  check_aligned(ckdw, qr);
  QuantileForecast out = mix1(ckdw, ckdt_day1);
  for (std::size_t h = 7 * 24; h < out.hours(); ++h) copy_row(qr, h, out);
  return out;
}

QuantileForecast blend(const QuantileForecast& ckdw, const QuantileForecast& ckdt_day1, const QuantileForecast& qr,
                       const HybridWeights& weights) {
  check_day1(ckdw, ckdt_day1);
  check_aligned(ckdw, qr);
  QuantileForecast out(ckdw.start(), ckdw.hours());
  for (std::size_t h = 0; h < out.hours(); ++h) {
    const int tau = period_of_hour(h);
    if (tau == 1) {
      copy_row(ckdt_day1, h, out);
      continue;
    }
    const double w = weights.at(tau);
    const auto a = ckdw.row(h), b = qr.row(h);
    auto dest = out.row(h);
    for (std::size_t k = 0; k < kQuantileCount; ++k) dest[k] = w * a[k] + (1.0 - w) * b[k];
  }
  return out;
}

QuantileForecast hybrid(const QuantileForecast& ckdw, const QuantileForecast& ckdt_day1, const QuantileForecast& qr,
                        const HybridWeights& weights) {
  return repair_crossing(blend(ckdw, ckdt_day1, qr, weights));
}

std::vector<double> default_weight_grid() {
  std::vector<double> grid;
  for (int k = 0; k <= 20; ++k) grid.push_back(k / 20.0);
  return grid;
}

HybridWeights train_weights(std::span<const PastTask> tasks, std::span<const double> grid) {
  if (tasks.empty()) fail(Errc::no_tasks, "weight training needs at least one past task");
  if (grid.empty()) fail(Errc::invalid_config, "weight grid is empty");
  for (double w : grid) check_weight(w);

  const auto& levels = quantile_levels();
  std::array<std::vector<double>, 4> optima;
  for (const auto& task : tasks) {
    check_aligned(task.ckdw, task.qr);
    std::array<std::vector<std::size_t>, 4> hours_of;
    std::vector<double> actual(task.ckdw.hours());
    for (std::size_t h = 0; h < task.ckdw.hours(); ++h) {
      const auto idx = task.actuals.index_of(task.ckdw.time_at(h));
      if (!idx) fail(Errc::horizon_mismatch, "actuals do not cover the past task horizon");
      actual[h] = task.actuals[*idx];
      const int tau = period_of_hour(h);
      if (tau >= 2) hours_of[static_cast<std::size_t>(tau - 2)].push_back(h);
    }
    for (std::size_t p = 0; p < 4; ++p) {
      if (hours_of[p].empty()) continue;
      double best_w = 0.0, best_loss = std::numeric_limits<double>::infinity();
      for (double w : grid) {
        double loss = 0.0;
        for (auto h : hours_of[p]) {
          const auto a = task.ckdw.row(h), b = task.qr.row(h);
          for (std::size_t k = 0; k < kQuantileCount; ++k)
            loss += pinball_loss_term(levels[k], actual[h] - (w * a[k] + (1.0 - w) * b[k]));
        }
        if (loss < best_loss || (loss == best_loss && w < best_w)) {
          best_loss = loss;
          best_w = w;
        }
      }
      optima[p].push_back(best_w);
    }
  }

  HybridWeights out;
  for (std::size_t p = 0; p < 4; ++p) {
    auto& o = optima[p];
    if (o.empty()) {
      out.set(static_cast<int>(p) + 2, 0.5);
      continue;
    }
    // Sorting first makes the mean independent of task order.
    std::sort(o.begin(), o.end());
    double sum = 0.0;
    for (double w : o) sum += w;
    out.set(static_cast<int>(p) + 2, std::clamp(sum / static_cast<double>(o.size()), 0.0, 1.0));
  }
  return out;
}

void write_weights(const std::filesystem::path& path, const HybridWeights& weights) {
  std::ofstream out(path);
  if (!out) fail(Errc::io_error, "cannot write " + path.string());
  out << "tau,weight\n";
  for (int tau = 2; tau <= 5; ++tau) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, weights.at(tau));
    out << tau << ',' << std::string(buf, ptr) << '\n';
  }
  if (!out) fail(Errc::io_error, "write failed for " + path.string());
}

HybridWeights read_weights(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(Errc::weights_missing, "cannot open weights file " + path.string());
  std::array<bool, 4> seen{};
  HybridWeights weights;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.starts_with("tau")) continue;
    const auto comma = line.find(',');
    int tau = 0;
    double w = 0.0;
    const char* end = line.data() + line.size();
    const bool ok = comma != std::string::npos &&
                    std::from_chars(line.data(), line.data() + comma, tau).ptr == line.data() + comma &&
                    std::from_chars(line.data() + comma + 1, end, w).ptr == end;
    if (!ok || tau < 2 || tau > 5 || !(w >= 0.0 && w <= 1.0))
      fail(Errc::malformed_row, "bad weights line '" + line + "'");
    weights.set(tau, w);
    seen[static_cast<std::size_t>(tau - 2)] = true;
  }
  for (std::size_t p = 0; p < 4; ++p)
    if (!seen[p]) fail(Errc::weights_missing, "weights file lacks tau " + std::to_string(p + 2));
  return weights;
}

}  // namespace plf::hybrid
