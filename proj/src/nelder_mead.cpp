#include "plf/errors.hpp"
#include "plf/optim.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace plf::optim {

namespace {

using Point = std::vector<double>;

class SearchSpace {
public:
  SearchSpace(const VectorObjective& objective, BoundMode mode) : objective_(objective), mode_(mode) {
    if (objective.bounds) {
      if (objective.bounds->size() != objective.dimension)
        fail(Errc::invalid_config, "bounds must match the objective dimension");
      for (const auto& [lo, hi] : *objective.bounds) {
        if (!(lo <= hi)) fail(Errc::invalid_config, "lower bound above upper bound");
        if (mode == BoundMode::log_transform && !(lo > 0.0))
          fail(Errc::invalid_config, "log-transform bounds must be positive");
      }
    }
  }

  Point to_search(std::span<const double> x) const {
    Point y(x.begin(), x.end());
    if (mode_ == BoundMode::log_transform) {
      for (double& v : y) {
        if (!(v > 0.0)) fail(Errc::invalid_config, "log-transform start must be positive");
        v = std::log(v);
      }
    }
    project(y);
    return y;
  }

  Point to_user(const Point& y) const {
    Point x = y;
    if (mode_ == BoundMode::log_transform)
      for (double& v : x) v = std::exp(v);
    return x;
  }

  void project(Point& y) const {
    if (!objective_.bounds || mode_ == BoundMode::none) return;
    for (std::size_t i = 0; i < y.size(); ++i) {
      auto [lo, hi] = (*objective_.bounds)[i];
      if (mode_ == BoundMode::log_transform) {
        lo = std::log(lo);
        hi = std::log(hi);
      }
      y[i] = std::clamp(y[i], lo, hi);
    }
  }

  double operator()(const Point& y) {
    ++evaluations;
    const auto x = to_user(y);
    const double v = objective_.evaluate(x);
    if (!std::isfinite(v)) fail(Errc::non_finite_objective, "Nelder-Mead objective returned a non-finite value");
    return v;
  }

  int evaluations = 0;

private:
  const VectorObjective& objective_;
  BoundMode mode_;
};

Point affine(const Point& a, const Point& b, double t) {
  // a + t (b - a)
  Point r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] + t * (b[i] - a[i]);
  return r;
}

}  // namespace

VectorMinimum minimize_nelder_mead(const VectorObjective& objective, std::span<const double> start, double tol,
                                   BoundMode mode) {
  const std::size_t n = objective.dimension;
  if (n == 0 || start.size() != n) fail(Errc::invalid_config, "start point does not match the dimension");
  if (!(tol > 0.0)) fail(Errc::invalid_config, "tolerance must be positive");

  SearchSpace space(objective, mode);
  std::vector<Point> simplex(n + 1);
  std::vector<double> f(n + 1);
  simplex[0] = space.to_search(start);
  f[0] = space(simplex[0]);
  for (std::size_t i = 0; i < n; ++i) {
    Point y = simplex[0];
    double step = mode == BoundMode::log_transform ? 0.1 : (y[i] != 0.0 ? 0.05 * y[i] : 0.00025);
    y[i] += step;
    space.project(y);
    if (y[i] == simplex[0][i]) {  // pinned against a bound
      y[i] -= step;
      space.project(y);
    }
    simplex[i + 1] = y;
    f[i + 1] = space(y);
  }

  std::vector<std::size_t> order(n + 1);
  const int max_iterations = 200 * static_cast<int>(n);
  int iteration = 0;
  bool converged = false;

  const auto sort_simplex = [&] {
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return f[a] < f[b]; });
    std::vector<Point> s(n + 1);
    std::vector<double> g(n + 1);
    for (std::size_t i = 0; i <= n; ++i) {
      s[i] = std::move(simplex[order[i]]);
      g[i] = f[order[i]];
    }
    simplex = std::move(s);
    f = std::move(g);
  };

  sort_simplex();
  while (iteration < max_iterations) {
    double diameter = 0.0, spread = 0.0;
    for (std::size_t i = 1; i <= n; ++i) {
      spread = std::max(spread, std::abs(f[i] - f[0]));
      for (std::size_t j = 0; j < n; ++j) diameter = std::max(diameter, std::abs(simplex[i][j] - simplex[0][j]));
    }
    if (diameter < tol && spread < tol) {
      converged = true;
      break;
    }
    ++iteration;

    Point centroid(n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) centroid[j] += simplex[i][j] / static_cast<double>(n);

    const Point& worst = simplex[n];
    Point reflected = affine(centroid, worst, -1.0);
    space.project(reflected);
    const double fr = space(reflected);

    if (fr < f[0]) {
      Point expanded = affine(centroid, worst, -2.0);
      space.project(expanded);
      const double fe = space(expanded);
      if (fe < fr) {
        simplex[n] = std::move(expanded);
        f[n] = fe;
      } else {
        simplex[n] = std::move(reflected);
        f[n] = fr;
      }
    } else if (fr < f[n - 1]) {
      simplex[n] = std::move(reflected);
      f[n] = fr;
    } else {
      bool shrink = false;
      if (fr < f[n]) {
        Point outside = affine(centroid, reflected, 0.5);
        space.project(outside);
        const double fc = space(outside);
        if (fc <= fr) {
          simplex[n] = std::move(outside);
          f[n] = fc;
        } else {
          shrink = true;
        }
      } else {
        Point inside = affine(centroid, worst, 0.5);
        space.project(inside);
        const double fcc = space(inside);
        if (fcc < f[n]) {
          simplex[n] = std::move(inside);
          f[n] = fcc;
        } else {
          shrink = true;
        }
      }
      if (shrink) {
        for (std::size_t i = 1; i <= n; ++i) {
          simplex[i] = affine(simplex[0], simplex[i], 0.5);
          space.project(simplex[i]);
          f[i] = space(simplex[i]);
        }
      }
    }
    sort_simplex();
  }

  VectorMinimum result;
  result.argmin = space.to_user(simplex[0]);
  result.value = f[0];
  result.iterations = iteration;
  result.evaluations = space.evaluations;
  result.converged = converged;
  return result;
}

}  // namespace plf::optim
