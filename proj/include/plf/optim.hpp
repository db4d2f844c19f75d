#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace plf::optim {

// ---------------------------------------------------------------------------
// Bounded scalar minimization (golden section with parabolic refinement)
// ---------------------------------------------------------------------------

struct ScalarObjective {
  std::function<double(double)> evaluate;
  double lower = 0.0;
  double upper = 1.0;
};

struct ScalarMinimum {
  double argmin = 0.0;
  double value = 0.0;
  int evaluations = 0;
};

inline constexpr int kMaxScalarEvaluations = 500;

/// Brent-style search on [lower, upper]. `on_bracket`, when given, sees the
/// bracket [a, b] after every iteration. Throws max_evaluations_exceeded.
ScalarMinimum minimize_bounded_scalar(const ScalarObjective& objective, double tol,
                                      const std::function<void(double, double)>& on_bracket = {});

/// Evaluates every grid point; ties go to the earliest point.
ScalarMinimum grid_search(const std::function<double(double)>& evaluate, std::span<const double> grid);

// ---------------------------------------------------------------------------
// Nelder-Mead
// ---------------------------------------------------------------------------

enum class BoundMode {
  none,           // plain simplex search, bounds ignored
  log_transform,  // search over log(x); bounds (if any) clamp in log space
  clamp,          // search over x; trial points are projected onto the bounds
};

struct VectorObjective {
  std::function<double(std::span<const double>)> evaluate;
  std::size_t dimension = 1;
  std::optional<std::vector<std::pair<double, double>>> bounds;
};

struct VectorMinimum {
  std::vector<double> argmin;
  double value = 0.0;
  int iterations = 0;
  int evaluations = 0;
  bool converged = false;
};

/// Reflection 1, expansion 2, contraction 0.5, shrink 0.5. Stops when both the
/// simplex diameter (in search coordinates) and the value spread fall below
/// `tol`, or after 200 * dimension iterations. Throws non_finite_objective.
VectorMinimum minimize_nelder_mead(const VectorObjective& objective, std::span<const double> start,
                                   double tol, BoundMode mode = BoundMode::none);

// ---------------------------------------------------------------------------
// Linear programming
// ---------------------------------------------------------------------------

/// min cost'x  s.t.  equality * x = rhs,  x >= 0.
struct LinearProgram {
  Eigen::VectorXd cost;
  Eigen::MatrixXd equality;
  Eigen::VectorXd rhs;
};

struct LpSolution {
  Eigen::VectorXd x;
  double objective = 0.0;
  int pivots = 0;
  /// Basic column per row at the optimum; empty if an artificial stayed basic.
  std::vector<std::size_t> basis;
};

enum class Pricing {
  bland,                   // lowest-index improving column
  dantzig_bland_fallback,  // most negative reduced cost; Bland after 50 degenerate pivots in a row
};

struct LpOptions {
  Pricing pricing = Pricing::bland;
  /// Feasible basis of an LP with the same constraints (e.g. the previous
  /// solution when only the cost changed). Ignored if singular or infeasible.
  std::vector<std::size_t> warm_basis;
};

/// Two-phase primal tableau simplex, Bland's rule by default. Rows whose unit column
/// already exists start with that column basic; only the remaining rows get
/// artificial variables. Throws infeasible, unbounded or invalid_config.
LpSolution solve_lp_simplex(const LinearProgram& lp, const LpOptions& options = {});

/// Solves the constraints of `lp` once per cost vector in order (lp.cost is
/// ignored). Each solve starts from the previous optimal basis, which stays
/// primal feasible because only the objective changes.
std::vector<LpSolution> solve_lp_sequence(const LinearProgram& lp, std::span<const Eigen::VectorXd> costs,
                                          const LpOptions& options = {});

}  // namespace plf::optim
