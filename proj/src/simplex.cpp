#include "plf/errors.hpp"
#include "plf/optim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

namespace plf::optim {

namespace {

constexpr double kPivotTol = 1e-11;
constexpr double kFlushTol = 1e-13;
constexpr double kPerturbation = 1e-9;
constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();

/// Dense row-major tableau. After the constraint columns come the working
/// right-hand side, which phase 2 perturbs, and the exact one.
class Tableau {
public:
  Tableau(std::size_t rows, std::size_t cols) : rows_(rows), width_(cols + 2), cells_(rows * width_, 0.0), z_(width_, 0.0) {}

  double* row(std::size_t i) noexcept { return cells_.data() + i * width_; }
  const double* row(std::size_t i) const noexcept { return cells_.data() + i * width_; }
  double& rhs(std::size_t i) noexcept { return row(i)[width_ - 2]; }
  double& exact(std::size_t i) noexcept { return row(i)[width_ - 1]; }
  std::vector<double>& reduced() noexcept { return z_; }
  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return width_ - 2; }

  void pivot(std::size_t r, std::size_t e) {
    double* pr = row(r);
    const double inv = 1.0 / pr[e];
    nonzeros_.clear();
    for (std::size_t j = 0; j < width_; ++j) {
      if (pr[j] == 0.0) continue;
      pr[j] *= inv;
      nonzeros_.push_back(j);
    }
    pr[e] = 1.0;
    for (std::size_t i = 0; i < rows_; ++i) {
      if (i == r) continue;
      eliminate(row(i), pr, e);
    }
    eliminate(z_.data(), pr, e);
  }

private:
  void eliminate(double* target, const double* pr, std::size_t e) {
    const double f = target[e];
    if (f == 0.0) return;
    for (std::size_t j : nonzeros_) {
      double v = target[j] - f * pr[j];
      if (std::abs(v) < kFlushTol) v = 0.0;
      target[j] = v;
    }
    target[e] = 0.0;
  }

  std::size_t rows_;
  std::size_t width_;
  std::vector<double> cells_;
  std::vector<double> z_;  // reduced costs; last entry is minus the objective
  std::vector<std::size_t> nonzeros_;
};

class SimplexRun {
public:
  SimplexRun(Tableau& t, std::vector<std::size_t>& basis, std::vector<char>& blocked, int& pivots, int max_pivots,
             Pricing pricing)
      : t_(t), basis_(basis), blocked_(blocked), pivots_(pivots), max_pivots_(max_pivots), pricing_(pricing) {}

  /// Entering column by the pricing rule; leaving row by minimum ratio with
  /// ties going to the lowest basic index. Columns whose negative reduced cost
  /// is below `noise_tol` and that have no positive entry are rounding noise
  /// and are set aside for the rest of the phase.
  void run(double cost_tol, double noise_tol) {
    auto& z = t_.reduced();
    std::vector<char> aside(t_.cols(), 0);
    bool bland = pricing_ == Pricing::bland;
    int degenerate_run = 0;
    while (true) {
      std::size_t enter = t_.cols();
      double most_negative = -cost_tol;
      for (std::size_t j = 0; j < t_.cols(); ++j) {
        if (blocked_[j] || aside[j] || !(z[j] < -cost_tol)) continue;
        if (bland) {
          enter = j;
          break;
        }
        if (z[j] < most_negative) {
          most_negative = z[j];
          enter = j;
        }
      }
      if (enter == t_.cols()) return;

      std::size_t leave = t_.rows();
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < t_.rows(); ++i) {
        const double a = t_.row(i)[enter];
        if (a <= kPivotTol) continue;
        const double ratio = std::max(0.0, t_.rhs(i)) / a;
        const double slack = 1e-12 * (1.0 + std::abs(best));
        if (leave == t_.rows() || ratio < best - slack) {
          best = ratio;
          leave = i;
        } else if (ratio <= best + slack && basis_[i] < basis_[leave]) {
          best = std::min(best, ratio);
          leave = i;
        }
      }
      if (leave == t_.rows()) {
        if (z[enter] < -noise_tol) fail(Errc::unbounded, "objective unbounded below");
        aside[enter] = 1;
        continue;
      }
      if (++pivots_ > max_pivots_) fail(Errc::max_evaluations_exceeded, "simplex pivot limit reached");
      // A long degenerate streak under steepest pricing hands over to Bland's
      // rule for the rest of the phase, which cannot cycle.
      if (!bland) {
        degenerate_run = best <= 0.0 ? degenerate_run + 1 : 0;
        if (degenerate_run > kDegenerateLimit) bland = true;
      }
      t_.pivot(leave, enter);
      basis_[leave] = enter;
    }
  }

private:
  static constexpr int kDegenerateLimit = 50;

  Tableau& t_;
  std::vector<std::size_t>& basis_;
  std::vector<char>& blocked_;
  int& pivots_;
  int max_pivots_;
  Pricing pricing_;
};

/// Pivots the columns of `wanted` into the basis, sparsest original columns
/// first. False if they do not form a basis or the basic point is infeasible.
bool install_basis(Tableau& t, std::vector<std::size_t>& basis, const std::vector<std::size_t>& wanted,
                   std::size_t n, double feasibility_tol) {
  const std::size_t m = t.rows();
  if (wanted.size() != m) return false;
  std::vector<char> want(t.cols(), 0);
  for (std::size_t j : wanted) {
    if (j >= n || want[j]) return false;
    want[j] = 1;
  }
  std::vector<char> is_basic(t.cols(), 0);
  for (std::size_t b : basis) is_basic[b] = 1;

  std::vector<std::size_t> nonzeros(t.cols(), 0);
  for (std::size_t i = 0; i < m; ++i) {
    const double* r = t.row(i);
    for (std::size_t j = 0; j < t.cols(); ++j) nonzeros[j] += r[j] != 0.0;
  }
  std::vector<std::pair<std::size_t, std::size_t>> order;  // (nonzeros, column)
  for (std::size_t j : wanted)
    if (!is_basic[j]) order.emplace_back(nonzeros[j], j);
  std::sort(order.begin(), order.end());
  for (const auto& [nz, j] : order) {
    std::size_t pick = m;
    double biggest = 1e-9;
    for (std::size_t i = 0; i < m; ++i) {
      if (want[basis[i]]) continue;
      const double a = std::abs(t.row(i)[j]);
      if (a > biggest) {
        biggest = a;
        pick = i;
      }
    }
    if (pick == m) return false;
    t.pivot(pick, j);
    basis[pick] = j;
  }
  for (std::size_t i = 0; i < m; ++i) {
    if (t.rhs(i) < -feasibility_tol) return false;
  }
  return true;
}

}  // namespace

namespace {

/// Constraint side of a solve: the scaled tableau with a feasible basis and
/// the artificial columns blocked. Phase 2 can run on it for any cost.
struct PreparedLp {
  std::size_t m = 0, n = 0;
  Tableau tableau{0, 0};
  std::vector<std::size_t> basis;
  std::vector<char> blocked;
  std::vector<double> scale;
  int setup_pivots = 0;
};

void check_lp(const LinearProgram& lp) {
  const auto m = static_cast<std::size_t>(lp.equality.rows());
  const auto n = static_cast<std::size_t>(lp.equality.cols());
  if (static_cast<std::size_t>(lp.cost.size()) != n || static_cast<std::size_t>(lp.rhs.size()) != m)
    fail(Errc::invalid_config, "linear program dimensions are inconsistent");
  if (!lp.cost.allFinite() || !lp.equality.allFinite() || !lp.rhs.allFinite())
    fail(Errc::invalid_config, "linear program has non-finite data");
}

PreparedLp prepare(const LinearProgram& lp, const LpOptions& options) {
  PreparedLp prep;
  const std::size_t m = prep.m = static_cast<std::size_t>(lp.equality.rows());
  const std::size_t n = prep.n = static_cast<std::size_t>(lp.equality.cols());

  // Row signs make every right-hand side nonnegative.
  std::vector<double> sign(m);
  for (std::size_t i = 0; i < m; ++i) sign[i] = lp.rhs[static_cast<Eigen::Index>(i)] < 0.0 ? -1.0 : 1.0;

  // Columns are scaled to unit max-norm; x_j = scale_j * (tableau variable j).
  auto& scale = prep.scale;
  scale.assign(n, 1.0);
  for (std::size_t j = 0; j < n; ++j) {
    const double top = lp.equality.col(static_cast<Eigen::Index>(j)).cwiseAbs().maxCoeff();
    if (top > 0.0) scale[j] = 1.0 / top;
  }
  const auto entry = [&](std::size_t i, std::size_t j) {
    return sign[i] * lp.equality(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) * scale[j];
  };

  // Unit columns start basic; remaining rows get artificials.
  auto& basis = prep.basis;
  basis.assign(m, kNone);
  for (std::size_t j = 0; j < n; ++j) {
    std::size_t hit = kNone;
    bool unit = true;
    for (std::size_t i = 0; i < m && unit; ++i) {
      const double a = entry(i, j);
      if (a == 0.0) continue;
      if (a == 1.0 && hit == kNone) hit = i;
      else unit = false;
    }
    if (unit && hit != kNone && basis[hit] == kNone) basis[hit] = j;
  }
  std::size_t artificials = 0;
  for (std::size_t i = 0; i < m; ++i)
    if (basis[i] == kNone) basis[i] = n + artificials++;

  const std::size_t cols = n + artificials;
  prep.tableau = Tableau(m, cols);
  auto& t = prep.tableau;
  // Row blocks keep both the column-major source and the row-major tableau cache friendly.
  constexpr std::size_t kBlock = 16;
  for (std::size_t i0 = 0; i0 < m; i0 += kBlock) {
    const std::size_t i1 = std::min(m, i0 + kBlock);
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t i = i0; i < i1; ++i) t.row(i)[j] = entry(i, j);
  }
  for (std::size_t i = 0; i < m; ++i) {
    if (basis[i] >= n) t.row(i)[basis[i]] = 1.0;
    t.rhs(i) = t.exact(i) = sign[i] * lp.rhs[static_cast<Eigen::Index>(i)];
  }

  const double rhs_scale = 1.0 + lp.rhs.cwiseAbs().maxCoeff();
  if (!options.warm_basis.empty() && artificials == 0) {
    if (!install_basis(t, basis, options.warm_basis, n, 1e-9 * rhs_scale)) {
      auto cold = options;
      cold.warm_basis.clear();
      return prepare(lp, cold);
    }
  }

  prep.blocked.assign(cols, 0);
  if (artificials > 0) {
    // Phase 1: minimize the sum of artificials.
    const int max_pivots = 50 * static_cast<int>(m + cols) + 1000;
    SimplexRun simplex(t, basis, prep.blocked, prep.setup_pivots, max_pivots, options.pricing);
    auto& z = t.reduced();
    std::fill(z.begin(), z.end(), 0.0);
    for (std::size_t j = n; j < cols; ++j) z[j] = 1.0;
    for (std::size_t i = 0; i < m; ++i) {
      if (basis[i] < n) continue;
      const double* r = t.row(i);
      for (std::size_t j = 0; j <= cols; ++j) z[j] -= r[j];
    }
    simplex.run(1e-11, 1e-7);
    if (-z[cols] > 1e-9 * rhs_scale) fail(Errc::infeasible, "no feasible point (phase 1 residual " + std::to_string(-z[cols]) + ")");

    // Pivot zero-level artificials out where possible; rows where that fails are redundant.
    for (std::size_t i = 0; i < m; ++i) {
      if (basis[i] < n) continue;
      const double* r = t.row(i);
      std::size_t pick = kNone;
      double biggest = 1e-9;
      for (std::size_t j = 0; j < n; ++j) {
        if (std::abs(r[j]) > biggest) {
          biggest = std::abs(r[j]);
          pick = j;
        }
      }
      if (pick != kNone) {
        t.pivot(i, pick);
        basis[i] = pick;
      }
    }
    for (std::size_t j = n; j < cols; ++j) prep.blocked[j] = 1;
  }

  // Lifting every basic value by a distinct tiny amount keeps the basis
  // feasible and removes degenerate vertices, which otherwise stall the
  // ratio test (exact fits in quantile regression are fully degenerate).
  // Solutions are read from the exact column, so the shift never reaches x.
  for (std::size_t i = 0; i < m; ++i) {
    const double jitter = static_cast<double>((i * 2654435761u) % 1024u) / 1024.0;
    t.rhs(i) = std::max(0.0, t.rhs(i)) + kPerturbation * rhs_scale * (1.0 + jitter);
  }
  return prep;
}

/// Phase 2 from the current (feasible) basis; the tableau keeps the optimum.
LpSolution optimize(PreparedLp& prep, const Eigen::VectorXd& lp_cost, Pricing pricing) {
  const std::size_t m = prep.m, n = prep.n;
  auto& t = prep.tableau;
  auto& basis = prep.basis;
  const std::size_t cols = t.cols();
  const auto cost = [&](std::size_t j) { return lp_cost[static_cast<Eigen::Index>(j)] * prep.scale[j]; };

  LpSolution sol;
  sol.x = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
  const int max_pivots = 50 * static_cast<int>(m + cols) + 1000;
  SimplexRun simplex(t, basis, prep.blocked, sol.pivots, max_pivots, pricing);
  auto& z = t.reduced();
  std::fill(z.begin(), z.end(), 0.0);
  for (std::size_t j = 0; j < n; ++j) z[j] = cost(j);
  for (std::size_t i = 0; i < m; ++i) {
    if (basis[i] >= n) continue;
    const double cb = cost(basis[i]);
    if (cb == 0.0) continue;
    const double* r = t.row(i);
    for (std::size_t j = 0; j <= cols; ++j) z[j] -= cb * r[j];
  }
  double cost_scale = 1.0;
  for (std::size_t j = 0; j < n; ++j) cost_scale = std::max(cost_scale, std::abs(cost(j)));
  simplex.run(1e-10 * cost_scale, 1e-7 * cost_scale);

  for (std::size_t i = 0; i < m; ++i)
    if (basis[i] < n) sol.x[static_cast<Eigen::Index>(basis[i])] = prep.scale[basis[i]] * std::max(0.0, t.exact(i));
  sol.objective = lp_cost.dot(sol.x);
  if (std::all_of(basis.begin(), basis.end(), [n](std::size_t b) { return b < n; })) sol.basis = basis;
  return sol;
}

}  // namespace

LpSolution solve_lp_simplex(const LinearProgram& lp, const LpOptions& options) {
  check_lp(lp);
  if (lp.equality.rows() == 0) {
    if ((lp.cost.array() < 0.0).any()) fail(Errc::unbounded, "unconstrained negative cost");
    LpSolution sol;
    sol.x = Eigen::VectorXd::Zero(lp.cost.size());
    return sol;
  }
  auto prep = prepare(lp, options);
  auto sol = optimize(prep, lp.cost, options.pricing);
  sol.pivots += prep.setup_pivots;
  return sol;
}

std::vector<LpSolution> solve_lp_sequence(const LinearProgram& lp, std::span<const Eigen::VectorXd> costs,
                                          const LpOptions& options) {
  check_lp(lp);
  for (const auto& c : costs)
    if (c.size() != lp.cost.size() || !c.allFinite())
      fail(Errc::invalid_config, "every cost vector must match the constraint columns and be finite");
  std::vector<LpSolution> out;
  out.reserve(costs.size());
  if (lp.equality.rows() == 0) {
    for (const auto& c : costs) {
      if ((c.array() < 0.0).any()) fail(Errc::unbounded, "unconstrained negative cost");
      LpSolution sol;
      sol.x = Eigen::VectorXd::Zero(c.size());
      out.push_back(std::move(sol));
    }
    return out;
  }
  auto prep = prepare(lp, options);
  for (const auto& c : costs) out.push_back(optimize(prep, c, options.pricing));
  if (!out.empty()) out.front().pivots += prep.setup_pivots;
  return out;
}

}  // namespace plf::optim
