#include "plf/errors.hpp"
#include "plf/optim.hpp"

#include <cmath>
#include <limits>

namespace plf::optim {

namespace {

class CountedScalar {
public:
  explicit CountedScalar(const std::function<double(double)>& f) : f_(f) {}

  double operator()(double x) {
    if (++count_ > kMaxScalarEvaluations)
      fail(Errc::max_evaluations_exceeded, "bounded scalar search exceeded " +
                                               std::to_string(kMaxScalarEvaluations) + " evaluations");
    const double v = f_(x);
    if (!std::isfinite(v)) fail(Errc::non_finite_objective, "objective not finite at " + std::to_string(x));
    return v;
  }
  int count() const noexcept { return count_; }

private:
  const std::function<double(double)>& f_;
  int count_ = 0;
};

}  // namespace

ScalarMinimum minimize_bounded_scalar(const ScalarObjective& objective, double tol,
                                      const std::function<void(double, double)>& on_bracket) {
  if (!(tol > 0.0)) fail(Errc::invalid_config, "tolerance must be positive");
  if (!(objective.lower < objective.upper)) fail(Errc::invalid_config, "lower bound must be below upper bound");

  CountedScalar f(objective.evaluate);
  const double golden = 0.5 * (3.0 - std::sqrt(5.0));
  const double sqrt_eps = std::sqrt(std::numeric_limits<double>::epsilon());

  double a = objective.lower, b = objective.upper;
  double v = a + golden * (b - a);
  double w = v, x = v;
  double d = 0.0, e = 0.0;
  double fx = f(x);
  double fv = fx, fw = fx;

  while (true) {
    const double xm = 0.5 * (a + b);
    const double tol1 = sqrt_eps * std::abs(x) + tol / 3.0;
    const double tol2 = 2.0 * tol1;
    if (std::abs(x - xm) <= tol2 - 0.5 * (b - a)) break;

    bool golden_step = true;
    if (std::abs(e) > tol1) {
      // parabola through (v, fv), (w, fw), (x, fx)
      double r = (x - w) * (fx - fv);
      double q = (x - v) * (fx - fw);
      double p = (x - v) * q - (x - w) * r;
      q = 2.0 * (q - r);
      if (q > 0.0) p = -p;
      q = std::abs(q);
      r = e;
      e = d;
      if (std::abs(p) < std::abs(0.5 * q * r) && p > q * (a - x) && p < q * (b - x)) {
        d = p / q;
        const double u = x + d;
        if ((u - a) < tol2 || (b - u) < tol2) d = (xm >= x) ? tol1 : -tol1;
        golden_step = false;
      }
    }
    if (golden_step) {
      e = (x >= xm) ? a - x : b - x;
      d = golden * e;
    }
    const double u = x + (std::abs(d) >= tol1 ? d : (d > 0.0 ? tol1 : -tol1));
    const double fu = f(u);

    if (fu <= fx) {
      if (u >= x) a = x; else b = x;
      v = w; fv = fw;
      w = x; fw = fx;
      x = u; fx = fu;
    } else {
      if (u < x) a = u; else b = u;
      if (fu <= fw || w == x) {
        v = w; fv = fw;
        w = u; fw = fu;
      } else if (fu <= fv || v == x || v == w) {
        v = u; fv = fu;
      }
    }
    if (on_bracket) on_bracket(a, b);
  }

  // The interior search never samples the bounds themselves; a monotone
  // objective attains its minimum there.
  ScalarMinimum best{x, fx, 0};
  for (double edge : {objective.lower, objective.upper}) {
    const double fe = f(edge);
    if (fe < best.value) best = {edge, fe, 0};
  }
  best.evaluations = f.count();
  return best;
}

ScalarMinimum grid_search(const std::function<double(double)>& evaluate, std::span<const double> grid) {
  if (grid.empty()) fail(Errc::invalid_config, "grid must not be empty");
  ScalarMinimum best{grid.front(), std::numeric_limits<double>::infinity(), 0};
  for (double g : grid) {
    const double v = evaluate(g);
    ++best.evaluations;
    if (v < best.value) {
      best.argmin = g;
      best.value = v;
    }
  }
  return best;
}

}  // namespace plf::optim
