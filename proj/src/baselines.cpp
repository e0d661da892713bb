#include "npglm/baselines.hpp"

#include <cmath>
#include <string>

#include "hazard_objective.hpp"
#include "npglm/error.hpp"
#include "npglm/npglm.hpp"

namespace npglm {

std::string_view FamilyTag(Family family) {
  switch (family) {
    case Family::kExponential: return "exp";
    case Family::kRayleigh: return "ray";
    case Family::kPowerLaw: return "pow";
    case Family::kGompertz: return "gom";
  }
  return "unknown";
}

Family ParseFamily(std::string_view tag) {
  if (tag == "exp" || tag == "exponential") return Family::kExponential;
  if (tag == "ray" || tag == "rayleigh") return Family::kRayleigh;
  if (tag == "pow" || tag == "powerlaw" || tag == "power-law") return Family::kPowerLaw;
  if (tag == "gom" || tag == "gompertz") return Family::kGompertz;
  throw Error(ErrorCode::kValidation, "unknown model family '" + std::string(tag) + "'");
}

double BaselineHazard(Family family, double shape, double t) {
  Require(t >= 0.0, "time must be non-negative");
  switch (family) {
    case Family::kExponential: return 1.0;
    case Family::kRayleigh: return t;
    case Family::kGompertz: return std::exp(t);
    case Family::kPowerLaw:
      if (t == 0.0 && shape < 1.0) {
        throw Error(ErrorCode::kUndefinedAtZero, "power-law hazard with shape < 1 is unbounded at t = 0");
      }
      return shape * std::pow(t, shape - 1.0);
  }
  return 0.0;
}

double BaselineCumulativeHazard(Family family, double shape, double t) {
  Require(t >= 0.0, "time must be non-negative");
  switch (family) {
    case Family::kExponential: return t;
    case Family::kRayleigh: return 0.5 * t * t;
    case Family::kGompertz: return std::expm1(t);
    case Family::kPowerLaw: return std::pow(t, shape);
  }
  return 0.0;
}

double InverseBaselineCumulativeHazard(Family family, double shape, double target) {
  Require(target >= 0.0, "cumulative hazard target must be non-negative");
  switch (family) {
    case Family::kExponential: return target;
    case Family::kRayleigh: return std::sqrt(2.0 * target);
    case Family::kGompertz: return std::log1p(target);
    case Family::kPowerLaw: return std::pow(target, 1.0 / shape);
  }
  return 0.0;
}

double ParametricModel::Rate(const Eigen::VectorXd& raw_x) const {
  const Eigen::VectorXd x = normalization.Apply(raw_x);
  Require(x.size() + 1 == w.size(), "feature vector has dimension " + std::to_string(x.size()) +
                                        ", model expects " + std::to_string(w.size() - 1));
  return std::exp(detail::Clamp(w.head(x.size()).dot(x) + w[x.size()]));
}

namespace {

struct ShapeSolution {
  Eigen::VectorXd w;
  double log_likelihood = 0.0;
  int iterations = 0;
  bool converged = false;
};

ShapeSolution SolveForShape(const Dataset& dataset, const Eigen::MatrixXd& design, const Eigen::VectorXd& y,
                            Family family, double shape, const ParametricOptions& options) {
  const auto n = static_cast<Eigen::Index>(dataset.size());
  Eigen::VectorXd cumulative(n);
  double log_h_sum = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const Sample& s = dataset[static_cast<std::size_t>(i)];
    cumulative[i] = BaselineCumulativeHazard(family, shape, s.t);
    if (s.y == 1) log_h_sum += std::log(BaselineHazard(family, shape, s.t));
  }
  Require(cumulative.allFinite(), "cumulative hazard overflows on the training times");
  const double scale = 1.0 / static_cast<double>(n);
  const detail::HazardObjective objective(design, y, cumulative, LinkFunction{}, options.l2_penalty, scale);
  const NewtonResult result = MinimizeNewton(
      [&objective](const Eigen::VectorXd& v, Eigen::VectorXd* g, Eigen::MatrixXd* h) { return objective(v, g, h); },
      Eigen::VectorXd::Zero(design.cols()), options.inner);
  ShapeSolution out;
  out.w = result.x;
  // The objective carries the l2 term; report the plain log-likelihood.
  const double penalty = 0.5 * options.l2_penalty * result.x.head(result.x.size() - 1).squaredNorm();
  out.log_likelihood = -(result.value - scale * penalty) + scale * log_h_sum;
  out.iterations = result.iterations;
  out.converged = result.converged;
  return out;
}

}  // namespace

ParametricModel FitParametric(const Dataset& dataset, Family family, const ParametricOptions& options) {
  Require(!dataset.empty(), "cannot fit an empty dataset");
  Require(options.min_shape > 0.0 && options.min_shape < options.max_shape, "invalid power-law shape bracket");
  Require(options.shape_tolerance > 0.0, "shape tolerance must be positive");
  if (dataset.n_observed() == 0) {
    throw Error(ErrorCode::kNoObservedEvents, "dataset has no observed (y=1) samples");
  }
  if (family == Family::kPowerLaw) {
    for (const Sample& s : dataset) {
      if (s.y == 1 && s.t == 0.0) {
        throw Error(ErrorCode::kUndefinedAtZero, "power-law likelihood needs observed times > 0");
      }
    }
  }

  const Eigen::MatrixXd design = DesignMatrix(dataset);
  const Eigen::VectorXd y = dataset.Observed();

  ParametricModel model;
  model.family = family;
  double shape = 1.0;
  if (family == Family::kPowerLaw) {
    const double log_shape = GoldenSectionMinimize(
        [&](double s) { return -SolveForShape(dataset, design, y, family, std::exp(s), options).log_likelihood; },
        std::log(options.min_shape), std::log(options.max_shape), options.shape_tolerance);
    shape = std::exp(log_shape);
    model.shape = shape;
  }

  const ShapeSolution solution = SolveForShape(dataset, design, y, family, shape, options);
  if (!solution.converged) {
    throw Error(ErrorCode::kNonConvergence,
                std::string(FamilyTag(family)) + " baseline did not reach the gradient tolerance");
  }
  if (((design * solution.w).array().abs() > kLinearPredictorClamp).any()) {
    throw Error(ErrorCode::kNonFiniteObjective,
                "linear predictor exceeds the overflow clamp at the solution; rescale features");
  }
  model.w = solution.w;
  model.log_likelihood = solution.log_likelihood;
  model.iterations = solution.iterations;
  return model;
}

double Quantile(const ParametricModel& model, const Eigen::VectorXd& raw_x, double alpha) {
  Require(alpha >= 0.0 && alpha < 1.0, "quantile level must lie in [0, 1)");
  const double target = -std::log1p(-alpha) / model.Rate(raw_x);
  return InverseBaselineCumulativeHazard(model.family, model.ShapeOrOne(), target);
}

double RangedProbability(const ParametricModel& model, const Eigen::VectorXd& raw_x, double t_alpha,
                         double t_beta) {
  if (t_alpha > t_beta) {
    throw Error(ErrorCode::kInvalidRange, "t_alpha must not exceed t_beta");
  }
  const double g = model.Rate(raw_x);
  const double shape = model.ShapeOrOne();
  return SurvivalFromH(g, BaselineCumulativeHazard(model.family, shape, t_alpha)) -
         SurvivalFromH(g, BaselineCumulativeHazard(model.family, shape, t_beta));
}

}  // namespace npglm
