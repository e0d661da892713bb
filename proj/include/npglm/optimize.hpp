#pragma once

#include <functional>

#include <Eigen/Core>

namespace npglm {

// Evaluates f(x); fills gradient / Hessian when the pointers are non-null.
using SmoothObjective =
    std::function<double(const Eigen::VectorXd& x, Eigen::VectorXd* gradient, Eigen::MatrixXd* hessian)>;

struct NewtonOptions {
  double gradient_tolerance = 1e-8;  // on the sup-norm of the gradient
  int max_iterations = 100;
  double armijo = 1e-4;
  double backtrack = 0.5;
  int max_backtracks = 60;
};

struct NewtonResult {
  Eigen::VectorXd x;
  double value = 0.0;
  Eigen::VectorXd gradient;
  int iterations = 0;
  bool converged = false;
};

/// Damped Newton descent with Armijo backtracking for smooth convex
/// objectives. An indefinite or singular Hessian is shifted toward the
/// identity until its Cholesky factorization succeeds.
NewtonResult MinimizeNewton(const SmoothObjective& objective, Eigen::VectorXd x0,
                            const NewtonOptions& options = {});

/// Golden-section search for the minimum of a unimodal f on [lo, hi].
double GoldenSectionMinimize(const std::function<double(double)>& f, double lo, double hi,
                             double tolerance);

}  // namespace npglm
