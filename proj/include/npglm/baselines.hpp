#pragma once

#include <optional>
#include <string_view>

#include <Eigen/Core>

#include "npglm/optimize.hpp"
#include "npglm/standardizer.hpp"
#include "npglm/survival.hpp"

namespace npglm {

// Parametric proportional-hazards GLMs, lambda(t | x) = exp(w'x) h(t).
enum class Family { kExponential, kRayleigh, kPowerLaw, kGompertz };

std::string_view FamilyTag(Family family);  // exp, ray, pow, gom
Family ParseFamily(std::string_view tag);

// h(t): 1, t, shape * t^(shape - 1), e^t.
double BaselineHazard(Family family, double shape, double t);
// H(t): t, t^2 / 2, t^shape, e^t - 1.
double BaselineCumulativeHazard(Family family, double shape, double t);
// Solves H(t) = target.
double InverseBaselineCumulativeHazard(Family family, double shape, double target);

struct ParametricOptions {
  NewtonOptions inner;
  double l2_penalty = 0.0;
  // Power-law shape is searched on log(shape) over this bracket.
  double min_shape = 1e-2;
  double max_shape = 1e2;
  double shape_tolerance = 1e-6;
};

struct ParametricModel {
  Family family = Family::kExponential;
  Eigen::VectorXd w;  // feature coefficients, intercept last
  std::optional<double> shape;
  Standardizer normalization;
  double log_likelihood = 0.0;  // average over the training samples
  int iterations = 0;

  double Rate(const Eigen::VectorXd& raw_x) const;
  double ShapeOrOne() const { return shape.value_or(1.0); }
};

/// Censored maximum likelihood for one family: sum_i y_i [z_i + log h(t_i)]
/// - exp(z_i) H(t_i). Convex in w; the power-law shape is profiled out by a
/// golden-section search over log(shape).
ParametricModel FitParametric(const Dataset& dataset, Family family, const ParametricOptions& options = {});

double Quantile(const ParametricModel& model, const Eigen::VectorXd& raw_x, double alpha);
double RangedProbability(const ParametricModel& model, const Eigen::VectorXd& raw_x, double t_alpha,
                         double t_beta);

}  // namespace npglm
