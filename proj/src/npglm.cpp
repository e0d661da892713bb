#include "npglm/npglm.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "hazard_objective.hpp"
#include "npglm/random.hpp"

namespace npglm {
namespace {

using detail::Clamp;
using detail::HazardObjective;

void CheckCoefficients(const Dataset& dataset, const Eigen::VectorXd& w) {
  Require(w.size() == dataset.dim() + 1, "coefficient vector must have d + 1 entries (intercept last)");
}

// Risk sets by sample index: raw[i] = sum_{j<=i} y_j / sum_{k>=j} g_k.
Eigen::VectorXd RawBreslow(const Dataset& dataset, const Eigen::VectorXd& z, const LinkFunction& link) {
  const auto n = static_cast<Eigen::Index>(dataset.size());
  Eigen::VectorXd risk(n);
  double suffix = 0.0;
  for (Eigen::Index i = n - 1; i >= 0; --i) {
    suffix += link.Value(Clamp(z[i]));
    risk[i] = suffix;
  }
  Eigen::VectorXd raw(n);
  double cumulative = 0.0;
  for (Eigen::Index j = 0; j < n; ++j) {
    if (dataset[static_cast<std::size_t>(j)].y == 1) {
      if (!(risk[j] > 0.0) || !std::isfinite(risk[j])) {
        throw Error(ErrorCode::kDegenerateRiskSet,
                    "risk-set sum at sample " + std::to_string(j) + " is zero or non-finite");
      }
      cumulative += 1.0 / risk[j];
    }
    raw[j] = cumulative;
  }
  return raw;
}

// Replaces each value with the last value of its tie group.
Eigen::VectorXd ShareTiedValues(const Dataset& dataset, Eigen::VectorXd raw) {
  const std::size_t n = dataset.size();
  std::size_t start = 0;
  while (start < n) {
    std::size_t stop = start + 1;
    while (stop < n && dataset[stop].t == dataset[start].t) ++stop;
    const double v = raw[static_cast<Eigen::Index>(stop - 1)];
    for (std::size_t i = start; i < stop; ++i) raw[static_cast<Eigen::Index>(i)] = v;
    start = stop;
  }
  return raw;
}

std::vector<double> TimesOf(const Dataset& dataset) {
  std::vector<double> times;
  times.reserve(dataset.size());
  for (const Sample& s : dataset) times.push_back(s.t);
  return times;
}

CumulativeHazardTable TableFrom(const Dataset& dataset, const Eigen::VectorXd& per_sample) {
  const std::vector<double> times = TimesOf(dataset);
  return CumulativeHazardTable(times, std::span<const double>(per_sample.data(), per_sample.size()));
}

void CheckFitOptions(const FitOptions& options) {
  Require(options.max_outer_iterations >= 1, "max_outer_iterations must be >= 1");
  Require(options.w_tolerance > 0.0, "w_tolerance must be positive");
  Require(options.inner.gradient_tolerance > 0.0, "inner gradient tolerance must be positive");
  Require(options.inner.max_iterations >= 1, "inner max_iterations must be >= 1");
  Require(options.l2_penalty >= 0.0, "l2_penalty must be non-negative");
}

}  // namespace

double NpglmModel::Rate(const Eigen::VectorXd& raw_x) const {
  const Eigen::VectorXd x = normalization.Apply(raw_x);
  Require(x.size() + 1 == w.size(), "feature vector has dimension " + std::to_string(x.size()) +
                                        ", model expects " + std::to_string(w.size() - 1));
  return link.Value(Clamp(w.head(x.size()).dot(x) + w[x.size()]));
}

Eigen::MatrixXd DesignMatrix(const Dataset& dataset) {
  Eigen::MatrixXd design(static_cast<Eigen::Index>(dataset.size()), dataset.dim() + 1);
  design.leftCols(dataset.dim()) = dataset.Features();
  design.col(dataset.dim()).setOnes();
  return design;
}

Eigen::VectorXd BreslowPerSample(const Dataset& dataset, const Eigen::VectorXd& w,
                                 const LinkFunction& link) {
  CheckCoefficients(dataset, w);
  const Eigen::VectorXd z = DesignMatrix(dataset) * w;
  return ShareTiedValues(dataset, RawBreslow(dataset, z, link));
}

CumulativeHazardTable BreslowHazard(const Dataset& dataset, const Eigen::VectorXd& w,
                                    const LinkFunction& link) {
  return TableFrom(dataset, BreslowPerSample(dataset, w, link));
}

ObjectiveValue NegativeLogLikelihood(const Dataset& dataset, const Eigen::VectorXd& w,
                                     const Eigen::VectorXd& h_values, const LinkFunction& link,
                                     double l2_penalty) {
  CheckCoefficients(dataset, w);
  Require(h_values.size() == static_cast<Eigen::Index>(dataset.size()),
          "H values must align with the dataset");
  Require((h_values.array() >= 0.0).all(), "H values must be non-negative");
  const Eigen::MatrixXd design = DesignMatrix(dataset);
  const Eigen::VectorXd y = dataset.Observed();
  const HazardObjective objective(design, y, h_values, link, l2_penalty, 1.0);
  ObjectiveValue out;
  out.value = objective(w, &out.gradient, nullptr, &out.clamped);
  if (!std::isfinite(out.value) || !out.gradient.allFinite()) {
    throw Error(ErrorCode::kNonFiniteObjective, "negative log-likelihood overflowed; rescale features");
  }
  return out;
}

double AverageLogLikelihood(const Dataset& dataset, const Eigen::VectorXd& w,
                            const CumulativeHazardTable& table, const LinkFunction& link) {
  CheckCoefficients(dataset, w);
  const Eigen::VectorXd z = DesignMatrix(dataset) * w;
  const auto& knots = table.knots();
  const auto& values = table.values();
  double total = 0.0;
  std::size_t k = 0;
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    const Sample& s = dataset[i];
    while (k < knots.size() && knots[k] < s.t) ++k;
    Require(k < knots.size() && knots[k] == s.t, "hazard table does not cover the dataset times");
    const double zc = Clamp(z[static_cast<Eigen::Index>(i)]);
    const double g = link.Value(zc);
    total -= g * values[k];
    if (s.y == 1) {
      const double left_t = k == 0 ? 0.0 : knots[k - 1];
      const double left_h = k == 0 ? 0.0 : values[k - 1];
      // An event at the origin has no segment to take a slope over.
      if (s.t > left_t) total += std::log(g) + std::log((values[k] - left_h) / (s.t - left_t));
    }
  }
  return total / static_cast<double>(dataset.size());
}

NpglmModel Fit(const Dataset& dataset, const FitOptions& options) {
  CheckFitOptions(options);
  Require(!dataset.empty(), "cannot fit an empty dataset");
  if (dataset.n_observed() == 0) {
    throw Error(ErrorCode::kNoObservedEvents, "dataset has no observed (y=1) samples");
  }

  const Eigen::Index p = dataset.dim() + 1;
  const Eigen::MatrixXd design = DesignMatrix(dataset);
  const Eigen::VectorXd y = dataset.Observed();
  const double scale = 1.0 / static_cast<double>(dataset.size());

  Eigen::VectorXd w = Eigen::VectorXd::Zero(p);
  if (options.init == InitKind::kSeededRandom) {
    Rng rng(options.seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    for (Eigen::Index j = 0; j < p; ++j) w[j] = normal(rng);
  }

  NpglmModel model;
  model.link = options.link;
  FitReport& report = model.report;
  for (int iteration = 1; iteration <= options.max_outer_iterations; ++iteration) {
    const Eigen::VectorXd h = ShareTiedValues(dataset, RawBreslow(dataset, design * w, options.link));
    const HazardObjective objective(design, y, h, options.link, options.l2_penalty, scale);
    const NewtonResult inner = MinimizeNewton(
        [&objective](const Eigen::VectorXd& v, Eigen::VectorXd* g, Eigen::MatrixXd* hess) {
          return objective(v, g, hess);
        },
        w, options.inner);

    const double change = (inner.x - w).lpNorm<Eigen::Infinity>();
    w = inner.x;
    report.iterations = iteration;
    report.w_change.push_back(change);
    report.log_likelihood.push_back(AverageLogLikelihood(dataset, w, TableFrom(dataset, h), options.link));
    if (change < options.w_tolerance) {
      report.converged = true;
      break;
    }
  }

  model.w = w;
  model.table = BreslowHazard(dataset, w, options.link);
  if (((design * w).array().abs() > kLinearPredictorClamp).any()) {
    throw Error(ErrorCode::kNonFiniteObjective,
                "linear predictor exceeds the overflow clamp at the solution; rescale features");
  }
  if (!report.converged) {
    throw NonConvergenceError("w did not settle within " + std::to_string(options.max_outer_iterations) +
                                  " outer iterations",
                              std::move(model));
  }
  return model;
}

double RangedProbability(const NpglmModel& model, const Eigen::VectorXd& raw_x, double t_alpha,
                         double t_beta) {
  if (t_alpha > t_beta) {
    throw Error(ErrorCode::kInvalidRange, "t_alpha must not exceed t_beta");
  }
  const double g = model.Rate(raw_x);
  return SurvivalFromH(g, model.table.Interpolate(t_alpha)) -
         SurvivalFromH(g, model.table.Interpolate(t_beta));
}

double Quantile(const NpglmModel& model, const Eigen::VectorXd& raw_x, double alpha) {
  Require(alpha >= 0.0 && alpha < 1.0, "quantile level must lie in [0, 1)");
  const double target = -std::log1p(-alpha) / model.Rate(raw_x);
  if (target > model.table.last_value()) {
    throw Error(ErrorCode::kQuantileBeyondWindow,
                "quantile " + std::to_string(alpha) + " lies past the observation window");
  }
  return model.table.Invert(target);
}

}  // namespace npglm
