#include "plf/quantile_regression.hpp"

#include "plf/errors.hpp"
#include "plf/optim.hpp"
#include "plf/parallel.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace plf::qr {

std::int64_t day_index(Timestamp t, Timestamp anchor) noexcept { return t.day_number() - anchor.day_number() + 1; }

std::array<double, kDesignColumns> design_row(std::int64_t k, double phi1) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  const double phi2 = second_phase(phi1);
  const auto kd = static_cast<double>(k);
  return {1.0,
          kd,
          std::sin(two_pi * 1.0 * (kd + phi1) / 365.0),
          std::sin(two_pi * 2.0 * (kd + phi1) / 365.0),
          std::sin(two_pi * 1.0 * (kd + phi2) / 365.0),
          std::sin(two_pi * 2.0 * (kd + phi2) / 365.0)};
}

namespace {

void check_fit_inputs(const Eigen::MatrixXd& design, const Eigen::VectorXd& targets, double q) {
  if (design.rows() == 0 || design.cols() == 0) fail(Errc::invalid_config, "quantile regression needs a nonempty design");
  if (targets.size() != design.rows()) fail(Errc::invalid_config, "design and target sizes differ");
  if (!(q > 0.0 && q < 1.0)) fail(Errc::invalid_config, "quantile level must lie in (0, 1)");
}

// Columns: beta+ (p), beta- (p), u (n), v (n).
optim::LinearProgram build_lp(const Eigen::MatrixXd& design, const Eigen::VectorXd& targets) {
  const auto n = design.rows();
  const auto p = design.cols();
  optim::LinearProgram lp;
  lp.equality = Eigen::MatrixXd::Zero(n, 2 * p + 2 * n);
  lp.equality.leftCols(p) = design;
  lp.equality.middleCols(p, p) = -design;
  lp.equality.middleCols(2 * p, n).setIdentity();
  lp.equality.middleCols(2 * p + n, n) = -Eigen::MatrixXd::Identity(n, n);
  lp.rhs = targets;
  return lp;
}

Eigen::VectorXd pinball_cost(Eigen::Index n, Eigen::Index p, double q) {
  Eigen::VectorXd cost = Eigen::VectorXd::Zero(2 * p + 2 * n);
  cost.segment(2 * p, n).setConstant(q);
  cost.segment(2 * p + n, n).setConstant(1.0 - q);
  return cost;
}

QuantileFit to_fit(optim::LpSolution solution, const Eigen::MatrixXd& design, const Eigen::VectorXd& targets,
                   double q) {
  const auto p = design.cols();
  QuantileFit fit;
  fit.coefficients = solution.x.head(p) - solution.x.segment(p, p);
  const Eigen::VectorXd residuals = targets - design * fit.coefficients;
  for (Eigen::Index t = 0; t < residuals.size(); ++t) fit.objective += pinball_loss_term(q, residuals[t]);
  fit.basis = std::move(solution.basis);
  return fit;
}

}  // namespace

QuantileFit fit_quantile_lp(const Eigen::MatrixXd& design, const Eigen::VectorXd& targets, double q,
                            std::span<const std::size_t> warm_basis) {
  check_fit_inputs(design, targets, q);
  auto lp = build_lp(design, targets);
  lp.cost = pinball_cost(design.rows(), design.cols(), q);
  optim::LpOptions options;
  options.pricing = optim::Pricing::dantzig_bland_fallback;
  options.warm_basis.assign(warm_basis.begin(), warm_basis.end());
  return to_fit(optim::solve_lp_simplex(lp, options), design, targets, q);
}

std::vector<QuantileFit> fit_quantile_levels(const Eigen::MatrixXd& design, const Eigen::VectorXd& targets,
                                             std::span<const double> levels) {
  std::vector<Eigen::VectorXd> costs;
  for (double q : levels) {
    check_fit_inputs(design, targets, q);
    costs.push_back(pinball_cost(design.rows(), design.cols(), q));
  }
  auto lp = build_lp(design, targets);
  lp.cost = costs.empty() ? pinball_cost(design.rows(), design.cols(), 0.5) : costs.front();
  optim::LpOptions options;
  options.pricing = optim::Pricing::dantzig_bland_fallback;
  auto solutions = optim::solve_lp_sequence(lp, costs, options);
  std::vector<QuantileFit> fits;
  for (std::size_t k = 0; k < solutions.size(); ++k)
    fits.push_back(to_fit(std::move(solutions[k]), design, targets, levels[k]));
  return fits;
}

QuantileForecast qr_forecast(const HourlySeries& history, Timestamp horizon_start, std::size_t horizon_hours,
                             const QrOptions& options) {
  if (horizon_hours == 0) fail(Errc::invalid_config, "horizon must contain at least one hour");
  if (options.window_days < 1 || options.min_days < 1 || options.min_days > options.window_days)
    fail(Errc::invalid_config, "QR window must satisfy 1 <= min_days <= window_days");

  // Training days: the window_days calendar days before the horizon's first day.
  const Timestamp first_day = horizon_start.midnight() - 24 * static_cast<std::int64_t>(options.window_days);
  std::array<bool, 24> needed{};
  for (std::size_t i = 0; i < std::min<std::size_t>(horizon_hours, 24); ++i)
    needed[static_cast<std::size_t>((horizon_start + static_cast<std::int64_t>(i)).hour())] = true;

  struct HourData {
    Eigen::MatrixXd design;
    Eigen::VectorXd targets;
  };
  std::array<HourData, 24> data;
  for (int h = 0; h < 24; ++h) {
    if (!needed[static_cast<std::size_t>(h)]) continue;
    std::vector<std::array<double, kDesignColumns>> rows;
    std::vector<double> ys;
    for (int d = 0; d < options.window_days; ++d) {
      const Timestamp t = first_day + 24 * static_cast<std::int64_t>(d) + h;
      const auto idx = history.index_of(t);
      if (!idx || t >= horizon_start) continue;
      rows.push_back(design_row(day_index(t, options.anchor), options.phi1));
      ys.push_back(history[*idx]);
    }
    if (rows.size() < static_cast<std::size_t>(options.min_days))
      fail(Errc::insufficient_history, "QR has " + std::to_string(rows.size()) + " training days for hour " +
                                           std::to_string(h) + ", needs " + std::to_string(options.min_days));
    auto& hd = data[static_cast<std::size_t>(h)];
    hd.design.resize(static_cast<Eigen::Index>(rows.size()), kDesignColumns);
    hd.targets.resize(static_cast<Eigen::Index>(rows.size()));
    for (std::size_t r = 0; r < rows.size(); ++r) {
      for (std::size_t c = 0; c < kDesignColumns; ++c)
        hd.design(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
      hd.targets[static_cast<Eigen::Index>(r)] = ys[r];
    }
  }

  // coefficients[h][k] for quantile level k.
  std::array<std::vector<Eigen::VectorXd>, 24> coef;
  for (auto& c : coef) c.resize(kQuantileCount);
  const auto& levels = quantile_levels();
  parallel_for(24, options.threads, [&](std::size_t h) {
    if (!needed[h]) return;
    auto fits = fit_quantile_levels(data[h].design, data[h].targets, levels);
    for (std::size_t k = 0; k < kQuantileCount; ++k) coef[h][k] = std::move(fits[k].coefficients);
  });

  QuantileForecast out(horizon_start, horizon_hours);
  for (std::size_t i = 0; i < horizon_hours; ++i) {
    const Timestamp t = horizon_start + static_cast<std::int64_t>(i);
    const auto row = design_row(day_index(t, options.anchor), options.phi1);
    const Eigen::Map<const Eigen::Matrix<double, kDesignColumns, 1>> x(row.data());
    auto dest = out.row(i);
    const auto& hc = coef[static_cast<std::size_t>(t.hour())];
    for (std::size_t k = 0; k < kQuantileCount; ++k) dest[k] = x.dot(hc[k]);
  }
  return repair_crossing(std::move(out));
}

}  // namespace plf::qr
