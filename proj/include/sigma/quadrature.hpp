#ifndef SIGMA_QUADRATURE_HPP_
#define SIGMA_QUADRATURE_HPP_

// Doubly-exponential quadrature over R^n: the substitution x = sinh(t)
// turns an integrand with exponential decay into one with doubly
// exponential decay, for which the trapezoid rule on a uniform t-grid
// converges geometrically.  Refinement halves the step until two
// consecutive levels agree to tolerance.

#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace sigma {

struct QuadratureError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct QuadratureOptions {
  double abs_tol = 1e-9;
  double rel_tol = 1e-9;
  double step0 = 0.5;      // coarsest t-spacing
  int max_refinements = 5; // finest spacing = step0 / 2^max_refinements
  double t_max = 8.0;      // |x| up to sinh(t_max) ~ 1.5e3
};

struct QuadratureResult {
  double value = 0;
  double error_estimate = 0;
  long evaluations = 0;
  bool converged = false;
};

namespace detail {

template <class F>
double tensor_sum(int dim, double h, long k_max, std::vector<double>& xs, double jac_prod,
                  int axis, F&& f, long& evals) {
  double sum = 0;
  for (long k = -k_max; k <= k_max; ++k) {
    double t = k * h;
    xs[axis] = std::sinh(t);
    double jp = jac_prod * std::cosh(t);
    if (axis + 1 < dim) {
      sum += tensor_sum(dim, h, k_max, xs, jp, axis + 1, f, evals);
    } else {
      ++evals;
      double v = f(xs);
      if (v != 0.0) sum += jp * v;
    }
  }
  return sum;
}

}  // namespace detail

/// Integrates f over R^dim.  f receives the coordinate vector.
template <class F>
QuadratureResult integrate_rn(int dim, F&& f, const QuadratureOptions& opt = {}) {
  if (dim < 1) throw std::invalid_argument("dimension must be positive");
  QuadratureResult res;
  double previous = 0;
  double prev_correction = 0;
  bool have_previous = false, have_prev_correction = false;
  for (int levelidx = 0; levelidx <= opt.max_refinements; ++levelidx) {
    double h = opt.step0 / std::exp2(levelidx);
    long k_max = static_cast<long>(std::ceil(opt.t_max / h));
    std::vector<double> xs(dim);
    double sum = detail::tensor_sum(dim, h, k_max, xs, 1.0, 0, f, res.evaluations);
    double value = sum * std::pow(h, dim);
    if (have_previous) {
      double correction = std::abs(value - previous);
      // |I_h - I_{h/2}| estimates the error of the coarser level; with
      // geometric convergence the finer level's error is approximately
      // correction^2 / previous correction
      res.error_estimate = correction;
      if (have_prev_correction && correction < 0.1 * prev_correction)
        res.error_estimate = std::min(correction, correction * correction / prev_correction);
      if (res.error_estimate <= std::max(opt.abs_tol, opt.rel_tol * std::abs(value))) {
        res.value = value;
        res.converged = true;
        return res;
      }
      prev_correction = correction;
      have_prev_correction = true;
    }
    previous = value;
    have_previous = true;
    res.value = value;
  }
  return res;  // converged stays false; caller decides whether to throw
}

template <class F>
double integrate_rn_checked(int dim, F&& f, const QuadratureOptions& opt = {}) {
  QuadratureResult r = integrate_rn(dim, std::forward<F>(f), opt);
  if (!r.converged)
    throw QuadratureError("quadrature did not converge: last correction " +
                          std::to_string(r.error_estimate) + " after " +
                          std::to_string(r.evaluations) + " evaluations");
  return r.value;
}

}  // namespace sigma

#endif  // SIGMA_QUADRATURE_HPP_
