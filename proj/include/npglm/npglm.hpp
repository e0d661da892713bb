#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Core>

#include "npglm/error.hpp"
#include "npglm/optimize.hpp"
#include "npglm/standardizer.hpp"
#include "npglm/survival.hpp"

namespace npglm {

// Linear predictors are clamped to this magnitude before the link is applied.
inline constexpr double kLinearPredictorClamp = 50.0;

enum class InitKind { kZeros, kSeededRandom };

struct FitOptions {
  int max_outer_iterations = 500;
  double w_tolerance = 1e-6;  // sup-norm change of w between outer iterations
  NewtonOptions inner;        // gradient tolerance applies to the per-sample average
  double l2_penalty = 0.0;    // intercept is never penalized
  InitKind init = InitKind::kZeros;
  std::uint64_t seed = 0;
  LinkFunction link;
};

struct FitReport {
  int iterations = 0;
  bool converged = false;
  // Average log-likelihood after each outer iteration.
  std::vector<double> log_likelihood;
  std::vector<double> w_change;

  double final_log_likelihood() const { return log_likelihood.empty() ? 0.0 : log_likelihood.back(); }
};

/// Fitted proportional-hazards model with a non-parametric cumulative hazard.
/// `w` has one entry per (normalized) feature followed by the intercept.
struct NpglmModel {
  Eigen::VectorXd w;
  CumulativeHazardTable table;
  LinkFunction link;
  Standardizer normalization;
  FitReport report;

  // g(w'x~) for a raw feature vector: normalization applied, intercept appended.
  double Rate(const Eigen::VectorXd& raw_x) const;
  double WindowEnd() const { return table.last_knot(); }
};

class NonConvergenceError : public Error {
 public:
  NonConvergenceError(const std::string& message, NpglmModel partial)
      : Error(ErrorCode::kNonConvergence, message), partial_(std::move(partial)) {}
  const NpglmModel& partial() const noexcept { return partial_; }

 private:
  NpglmModel partial_;
};

// N x (d + 1) design matrix with a trailing column of ones.
Eigen::MatrixXd DesignMatrix(const Dataset& dataset);

// Per-sample H(t_i) from the risk-set sums; tied times share the merged value.
Eigen::VectorXd BreslowPerSample(const Dataset& dataset, const Eigen::VectorXd& w,
                                 const LinkFunction& link = {});

/// Ĥ(t_i) = sum_{j<=i} y_j / sum_{k>=j} g(w'x_k), one reverse cumulative sum.
/// Every sample time becomes a knot; only observed times carry a jump.
CumulativeHazardTable BreslowHazard(const Dataset& dataset, const Eigen::VectorXd& w,
                                    const LinkFunction& link = {});

struct ObjectiveValue {
  double value = 0.0;
  Eigen::VectorXd gradient;
  bool clamped = false;
};

/// sum_i { g(w'x_i) H_i - y_i log g(w'x_i) } + (l2/2) |w without intercept|^2
/// with its exact gradient. With g = exp this is convex in w.
ObjectiveValue NegativeLogLikelihood(const Dataset& dataset, const Eigen::VectorXd& w,
                                     const Eigen::VectorXd& h_values, const LinkFunction& link = {},
                                     double l2_penalty = 0.0);

// Average log-likelihood including the sum of y_i log h(t_i), with h the
// slope of the merged table on the segment ending at t_i.
double AverageLogLikelihood(const Dataset& dataset, const Eigen::VectorXd& w,
                            const CumulativeHazardTable& table, const LinkFunction& link = {});

/// Alternates the closed-form hazard update with a Newton solve for w until
/// the sup-norm change of w drops below `w_tolerance`.
NpglmModel Fit(const Dataset& dataset, const FitOptions& options = {});

// P(t_alpha <= T <= t_beta | x).
double RangedProbability(const NpglmModel& model, const Eigen::VectorXd& raw_x, double t_alpha,
                         double t_beta);

// Time by which the event has happened with probability alpha.
double Quantile(const NpglmModel& model, const Eigen::VectorXd& raw_x, double alpha);

}  // namespace npglm
