#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "npglm/baselines.hpp"
#include "npglm/model.hpp"
#include "npglm/npglm.hpp"
#include "npglm/synthetic.hpp"

namespace npglm {

struct PointMetrics {
  double mae = 0.0;
  double mre = 0.0;
  std::size_t mre_skipped = 0;  // zero-truth samples left out of MRE
};

/// MAE = mean |p - t|, MRE = mean |p - t| / t. Samples with t = 0 are left
/// out of the MRE; if every truth is zero that is a kZeroTruthTime error.
PointMetrics ComputePointMetrics(std::span<const double> predicted, std::span<const double> truths);

struct Interval {
  double lower = 0.25;
  double upper = 0.75;
};

std::vector<Interval> DefaultIntervals();  // 25-75, 20-80, 15-85

// Quantile that falls back to `window_end` when an NP-GLM quantile lies past
// the observation window. `capped` is set when the fallback was taken.
double CappedQuantile(const AnyModel& model, const Eigen::VectorXd& raw_x, double alpha, double window_end,
                      bool* capped = nullptr);

struct CiResult {
  double accuracy = 0.0;  // percent
  std::size_t capped_endpoints = 0;
};

/// Percentage of samples whose time lies in [q(lower), q(upper)].
CiResult CiAccuracy(const AnyModel& model, std::span<const Sample> samples, double lower_q, double upper_q,
                    double window_end);

struct ModelConfig {
  std::string tag = "npglm";  // npglm, exp, ray, pow, gom
  FitOptions npglm;
  ParametricOptions parametric;
};

ModelConfig ParseModelConfig(std::string_view tag);

// Fits a model; an NP-GLM run that exhausts its iterations yields the partial model.
AnyModel FitModel(const ModelConfig& config, const Dataset& train);

/// Fold index per sample. Observed and censored samples are shuffled
/// separately and dealt round-robin so each fold keeps the class balance.
std::vector<int> StratifiedFolds(const Dataset& dataset, int k, std::uint64_t seed);

struct FoldMetrics {
  double mae = 0.0;
  double mre = 0.0;
  std::vector<double> ci;  // one accuracy per interval
  std::size_t test_observed = 0;
  std::size_t capped = 0;
};

struct Summary {
  double mean = 0.0;
  double std = 0.0;  // sample standard deviation across folds
};

struct ModelReport {
  std::string tag;
  std::vector<FoldMetrics> folds;
  Summary mae;
  Summary mre;
  std::vector<Summary> ci;
};

struct KfoldOptions {
  std::vector<Interval> intervals = DefaultIntervals();
  bool standardize = false;  // refit z-scoring on every training split
  int jobs = 1;
};

struct EvalReport {
  int k = 0;
  std::uint64_t seed = 0;
  std::size_t samples = 0;
  std::size_t observed = 0;
  std::vector<Interval> intervals;
  std::vector<ModelReport> models;
};

Summary Summarize(std::span<const double> values);

/// k-fold cross-validation. Median and interval predictions are scored on
/// the observed test samples only; censored test samples have no known time.
EvalReport KfoldEvaluate(const Dataset& dataset, const std::vector<ModelConfig>& models, int k,
                         std::uint64_t seed, const KfoldOptions& options = {});

enum class StudyKind { kConvergence, kMaeVsN, kCensoringRatio, kCensoredCount };

StudyKind ParseStudyKind(std::string_view name);

struct StudyConfig {
  Distribution distribution = Distribution::kRayleigh;
  Eigen::Index dim = 10;
  std::vector<std::size_t> n_values{1000};            // total sample counts
  std::vector<double> censoring_ratios{0.5};
  std::vector<std::size_t> observed_counts{200};      // censored-count study
  std::vector<std::size_t> censored_counts{0, 40, 80, 120, 160, 200};
  int repetitions = 20;
  std::uint64_t seed = 0;
  FitOptions fit;
  int jobs = 1;
};

struct StudyTable {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

// Mean absolute error of the feature coefficients (intercept excluded).
double CoefficientMae(const Eigen::VectorXd& fitted_w, const Eigen::VectorXd& true_w);

/// Runs a synthetic study grid. Repetition r of every cell draws from the
/// same child seed, so cells differ only in the varied setting.
StudyTable RunStudy(StudyKind kind, const StudyConfig& config);

// Calls fn(i) for i in [0, n) on up to `jobs` threads.
void ParallelFor(std::size_t n, int jobs, const std::function<void(std::size_t)>& fn);

}  // namespace npglm
