#include "npglm/optimize.hpp"

#include <cmath>
#include <limits>

#include <Eigen/Cholesky>

namespace npglm {
namespace {

Eigen::VectorXd NewtonDirection(const Eigen::MatrixXd& hessian, const Eigen::VectorXd& gradient) {
  const Eigen::Index n = gradient.size();
  const double diag_scale = std::max(1.0, hessian.diagonal().cwiseAbs().maxCoeff());
  double shift = 0.0;
  for (int attempt = 0; attempt < 30; ++attempt) {
    Eigen::MatrixXd shifted = hessian;
    if (shift > 0.0) shifted.diagonal().array() += shift;
    Eigen::LLT<Eigen::MatrixXd> llt(shifted);
    if (llt.info() == Eigen::Success) {
      Eigen::VectorXd direction = llt.solve(-gradient);
      if (direction.allFinite() && direction.dot(gradient) < 0.0) return direction;
    }
    shift = shift == 0.0 ? 1e-10 * diag_scale : shift * 10.0;
  }
  return -gradient / std::max(1.0, static_cast<double>(n));
}

}  // namespace

NewtonResult MinimizeNewton(const SmoothObjective& objective, Eigen::VectorXd x0,
                            const NewtonOptions& options) {
  NewtonResult result;
  result.x = std::move(x0);
  Eigen::MatrixXd hessian;
  result.value = objective(result.x, &result.gradient, &hessian);

  for (result.iterations = 0; result.iterations < options.max_iterations; ++result.iterations) {
    if (result.gradient.lpNorm<Eigen::Infinity>() <= options.gradient_tolerance) {
      result.converged = true;
      return result;
    }
    const Eigen::VectorXd direction = NewtonDirection(hessian, result.gradient);
    const double slope = direction.dot(result.gradient);

    double step = 1.0;
    bool accepted = false;
    Eigen::VectorXd trial;
    double trial_value = 0.0;
    for (int k = 0; k < options.max_backtracks; ++k) {
      trial = result.x + step * direction;
      trial_value = objective(trial, nullptr, nullptr);
      if (std::isfinite(trial_value) && trial_value < result.value &&
          trial_value <= result.value + options.armijo * step * slope) {
        accepted = true;
        break;
      }
      step *= options.backtrack;
    }
    if (!accepted) {
      // Near the optimum the decrease drops below double resolution; judge
      // the full step by the gradient instead.
      trial = result.x + direction;
      Eigen::VectorXd trial_gradient;
      Eigen::MatrixXd trial_hessian;
      trial_value = objective(trial, &trial_gradient, &trial_hessian);
      if (!std::isfinite(trial_value) || !trial_gradient.allFinite() ||
          trial_gradient.lpNorm<Eigen::Infinity>() >= result.gradient.lpNorm<Eigen::Infinity>()) {
        break;
      }
      result.x = std::move(trial);
      result.value = trial_value;
      result.gradient = std::move(trial_gradient);
      hessian = std::move(trial_hessian);
      continue;
    }
    result.x = std::move(trial);
    result.value = objective(result.x, &result.gradient, &hessian);
  }
  result.converged = result.gradient.lpNorm<Eigen::Infinity>() <= options.gradient_tolerance;
  return result;
}

double GoldenSectionMinimize(const std::function<double(double)>& f, double lo, double hi,
                             double tolerance) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo;
  double b = hi;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c);
  double fd = f(d);
  while (b - a > tolerance) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  return 0.5 * (a + b);
}

}  // namespace npglm
