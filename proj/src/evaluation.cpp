#include "npglm/evaluation.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <numeric>
#include <thread>

#include "npglm/error.hpp"
#include "npglm/random.hpp"

namespace npglm {

PointMetrics ComputePointMetrics(std::span<const double> predicted, std::span<const double> truths) {
  Require(predicted.size() == truths.size(), "prediction and truth counts differ");
  Require(!predicted.empty(), "point metrics need at least one sample");
  PointMetrics out;
  double relative = 0.0;
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    const double err = std::abs(predicted[i] - truths[i]);
    out.mae += err;
    if (truths[i] == 0.0) {
      ++out.mre_skipped;
    } else {
      relative += err / truths[i];
    }
  }
  out.mae /= static_cast<double>(predicted.size());
  if (out.mre_skipped == truths.size()) {
    throw Error(ErrorCode::kZeroTruthTime, "every truth time is zero; relative error undefined");
  }
  out.mre = relative / static_cast<double>(truths.size() - out.mre_skipped);
  return out;
}

std::vector<Interval> DefaultIntervals() { return {{0.25, 0.75}, {0.20, 0.80}, {0.15, 0.85}}; }

double CappedQuantile(const AnyModel& model, const Eigen::VectorXd& raw_x, double alpha, double window_end,
                      bool* capped) {
  if (capped != nullptr) *capped = false;
  try {
    return Quantile(model, raw_x, alpha);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kQuantileBeyondWindow) throw;
    if (capped != nullptr) *capped = true;
    return window_end;
  }
}

CiResult CiAccuracy(const AnyModel& model, std::span<const Sample> samples, double lower_q, double upper_q,
                    double window_end) {
  Require(0.0 <= lower_q && lower_q < upper_q && upper_q < 1.0, "interval needs 0 <= lower < upper < 1");
  Require(!samples.empty(), "interval accuracy needs at least one sample");
  CiResult out;
  std::size_t inside = 0;
  for (const Sample& s : samples) {
    bool capped_lo = false;
    bool capped_hi = false;
    const double lo = CappedQuantile(model, s.x, lower_q, window_end, &capped_lo);
    const double hi = CappedQuantile(model, s.x, upper_q, window_end, &capped_hi);
    out.capped_endpoints += static_cast<std::size_t>(capped_lo) + static_cast<std::size_t>(capped_hi);
    if (lo <= s.t && s.t <= hi) ++inside;
  }
  out.accuracy = 100.0 * static_cast<double>(inside) / static_cast<double>(samples.size());
  return out;
}

ModelConfig ParseModelConfig(std::string_view tag) {
  ModelConfig config;
  if (tag == "npglm") {
    config.tag = "npglm";
  } else {
    config.tag = std::string(FamilyTag(ParseFamily(tag)));
  }
  return config;
}

AnyModel FitModel(const ModelConfig& config, const Dataset& train) {
  if (config.tag == "npglm") {
    try {
      return Fit(train, config.npglm);
    } catch (const NonConvergenceError& e) {
      return e.partial();
    }
  }
  return FitParametric(train, ParseFamily(config.tag), config.parametric);
}

std::vector<int> StratifiedFolds(const Dataset& dataset, int k, std::uint64_t seed) {
  Require(k >= 2, "k-fold evaluation needs at least 2 folds");
  if (dataset.n_observed() < static_cast<std::size_t>(k)) {
    throw Error(ErrorCode::kFoldTooSmall, std::to_string(dataset.n_observed()) +
                                              " observed samples cannot populate " + std::to_string(k) + " folds");
  }
  std::vector<std::size_t> observed;
  std::vector<std::size_t> censored;
  for (std::size_t i = 0; i < dataset.size(); ++i) (dataset[i].y == 1 ? observed : censored).push_back(i);
  Rng rng(seed);
  std::shuffle(observed.begin(), observed.end(), rng);
  std::shuffle(censored.begin(), censored.end(), rng);

  std::vector<int> fold(dataset.size(), 0);
  std::size_t dealt = 0;
  for (const auto* group : {&observed, &censored}) {
    for (std::size_t i : *group) fold[i] = static_cast<int>(dealt++ % static_cast<std::size_t>(k));
  }
  return fold;
}

Summary Summarize(std::span<const double> values) {
  Summary s;
  if (values.empty()) return s;
  double sum = 0.0;
  for (double v : values) sum += v;
  s.mean = sum / static_cast<double>(values.size());
  if (values.size() > 1) {
    double sq = 0.0;
    for (double v : values) sq += (v - s.mean) * (v - s.mean);
    s.std = std::sqrt(sq / static_cast<double>(values.size() - 1));
  }
  return s;
}

void ParallelFor(std::size_t n, int jobs, const std::function<void(std::size_t)>& fn) {
  const auto workers = static_cast<std::size_t>(std::max(1, jobs));
  if (workers == 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> threads;
  for (std::size_t w = 0; w < std::min(workers, n); ++w) {
    threads.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& t : threads) t.join();
  if (failure) std::rethrow_exception(failure);
}

EvalReport KfoldEvaluate(const Dataset& dataset, const std::vector<ModelConfig>& models, int k,
                         std::uint64_t seed, const KfoldOptions& options) {
  Require(!models.empty(), "no models to evaluate");
  Require(!options.intervals.empty(), "no confidence intervals configured");
  const std::vector<int> fold = StratifiedFolds(dataset, k, seed);

  EvalReport report;
  report.k = k;
  report.seed = seed;
  report.samples = dataset.size();
  report.observed = dataset.n_observed();
  report.intervals = options.intervals;
  report.models.resize(models.size());
  for (std::size_t m = 0; m < models.size(); ++m) {
    report.models[m].tag = models[m].tag;
    report.models[m].folds.resize(static_cast<std::size_t>(k));
  }

  const auto kk = static_cast<std::size_t>(k);
  ParallelFor(kk * models.size(), options.jobs, [&](std::size_t task) {
    const std::size_t f = task % kk;
    const std::size_t m = task / kk;
    std::vector<std::size_t> train_idx;
    std::vector<Sample> test;
    for (std::size_t i = 0; i < dataset.size(); ++i) {
      if (static_cast<std::size_t>(fold[i]) != f) {
        train_idx.push_back(i);
      } else if (dataset[i].y == 1) {
        test.push_back(dataset[i]);
      }
    }
    if (test.empty()) throw Error(ErrorCode::kFoldTooSmall, "fold " + std::to_string(f) + " has no observed samples");

    Dataset train = dataset.Subset(train_idx);
    Standardizer normalization;
    if (options.standardize) {
      normalization = Standardizer::Fit(train);
      train = normalization.Apply(train);
    }
    AnyModel model = FitModel(models[m], train);
    SetNormalization(model, normalization);
    const double window_end = train.samples().back().t;

    FoldMetrics metrics;
    metrics.test_observed = test.size();
    std::vector<double> predicted;
    std::vector<double> truths;
    for (const Sample& s : test) {
      bool capped = false;
      predicted.push_back(CappedQuantile(model, s.x, 0.5, window_end, &capped));
      truths.push_back(s.t);
      metrics.capped += static_cast<std::size_t>(capped);
    }
    const PointMetrics point = ComputePointMetrics(predicted, truths);
    metrics.mae = point.mae;
    metrics.mre = point.mre;
    for (const Interval& interval : options.intervals) {
      const CiResult ci = CiAccuracy(model, test, interval.lower, interval.upper, window_end);
      metrics.ci.push_back(ci.accuracy);
      metrics.capped += ci.capped_endpoints;
    }
    report.models[m].folds[f] = std::move(metrics);
  });

  for (ModelReport& row : report.models) {
    std::vector<double> mae;
    std::vector<double> mre;
    for (const FoldMetrics& fm : row.folds) {
      mae.push_back(fm.mae);
      mre.push_back(fm.mre);
    }
    row.mae = Summarize(mae);
    row.mre = Summarize(mre);
    for (std::size_t c = 0; c < options.intervals.size(); ++c) {
      std::vector<double> acc;
      for (const FoldMetrics& fm : row.folds) acc.push_back(fm.ci[c]);
      row.ci.push_back(Summarize(acc));
    }
  }
  return report;
}

StudyKind ParseStudyKind(std::string_view name) {
  if (name == "convergence") return StudyKind::kConvergence;
  if (name == "mae-vs-n" || name == "mae_vs_n") return StudyKind::kMaeVsN;
  if (name == "censoring-ratio" || name == "censoring_ratio") return StudyKind::kCensoringRatio;
  if (name == "censored-count" || name == "censored_count") return StudyKind::kCensoredCount;
  throw Error(ErrorCode::kValidation, "unknown study '" + std::string(name) + "'");
}

double CoefficientMae(const Eigen::VectorXd& fitted_w, const Eigen::VectorXd& true_w) {
  Require(fitted_w.size() == true_w.size() + 1, "fitted coefficients must be the true ones plus an intercept");
  return (fitted_w.head(true_w.size()) - true_w).cwiseAbs().mean();
}

namespace {

struct Cell {
  std::size_t n_observed = 0;
  std::size_t n_censored = 0;
  double ratio = 0.0;
};

Cell CellFromRatio(std::size_t n, double ratio) {
  Require(ratio >= 0.0 && ratio < 1.0, "censoring ratio must lie in [0, 1)");
  Require(n >= 1, "sample count must be positive");
  const auto censored = static_cast<std::size_t>(std::llround(static_cast<double>(n) * ratio));
  Require(censored < n, "censoring leaves no observed samples");
  return {n - censored, censored, ratio};
}

struct RepResult {
  std::vector<double> curve;
  double mae = 0.0;
};

RepResult RunRep(const StudyConfig& config, const Cell& cell, int rep) {
  SynthConfig synth;
  synth.distribution = config.distribution;
  synth.dim = config.dim;
  synth.n_observed = cell.n_observed;
  synth.n_censored = cell.n_censored;
  synth.seed = DeriveSeed(config.seed, "rep", static_cast<std::uint64_t>(rep));
  const SyntheticData data = Generate(synth);

  FitOptions fit = config.fit;
  fit.seed = DeriveSeed(config.seed, "init", static_cast<std::uint64_t>(rep));
  NpglmModel model;
  try {
    model = Fit(data.dataset, fit);
  } catch (const NonConvergenceError& e) {
    model = e.partial();
  }
  return {model.report.log_likelihood, CoefficientMae(model.w, data.truth.w)};
}

std::vector<std::vector<RepResult>> RunCells(const StudyConfig& config, const std::vector<Cell>& cells) {
  Require(config.repetitions >= 1, "study needs at least one repetition");
  const auto reps = static_cast<std::size_t>(config.repetitions);
  std::vector<std::vector<RepResult>> results(cells.size(), std::vector<RepResult>(reps));
  ParallelFor(cells.size() * reps, config.jobs, [&](std::size_t task) {
    const std::size_t c = task / reps;
    const std::size_t r = task % reps;
    results[c][r] = RunRep(config, cells[c], static_cast<int>(r));
  });
  return results;
}

std::vector<double> MaeRow(std::vector<double> prefix, const std::vector<RepResult>& reps) {
  std::vector<double> mae;
  for (const RepResult& r : reps) mae.push_back(r.mae);
  const Summary s = Summarize(mae);
  prefix.insert(prefix.end(), {s.mean, s.std, static_cast<double>(reps.size())});
  return prefix;
}

}  // namespace

StudyTable RunStudy(StudyKind kind, const StudyConfig& config) {
  StudyTable table;
  std::vector<Cell> cells;
  switch (kind) {
    case StudyKind::kConvergence:
    case StudyKind::kMaeVsN:
      for (double ratio : config.censoring_ratios) {
        for (std::size_t n : config.n_values) cells.push_back(CellFromRatio(n, ratio));
      }
      break;
    case StudyKind::kCensoringRatio:
      for (std::size_t n : config.n_values) {
        for (double ratio : config.censoring_ratios) cells.push_back(CellFromRatio(n, ratio));
      }
      break;
    case StudyKind::kCensoredCount:
      for (std::size_t n_obs : config.observed_counts) {
        Require(n_obs >= 1, "observed count must be positive");
        for (std::size_t n_cens : config.censored_counts) {
          const double total = static_cast<double>(n_obs + n_cens);
          cells.push_back({n_obs, n_cens, static_cast<double>(n_cens) / total});
        }
      }
      break;
  }
  Require(!cells.empty(), "study grid is empty");
  const auto results = RunCells(config, cells);

  if (kind == StudyKind::kConvergence) {
    table.columns = {"n", "censoring", "iteration", "avg_log_likelihood"};
    for (std::size_t c = 0; c < cells.size(); ++c) {
      std::size_t longest = 0;
      for (const RepResult& r : results[c]) longest = std::max(longest, r.curve.size());
      // Finished repetitions hold their final value.
      for (std::size_t it = 0; it < longest; ++it) {
        double sum = 0.0;
        for (const RepResult& r : results[c]) sum += r.curve[std::min(it, r.curve.size() - 1)];
        const Cell& cell = cells[c];
        table.rows.push_back({static_cast<double>(cell.n_observed + cell.n_censored), cell.ratio,
                              static_cast<double>(it + 1), sum / static_cast<double>(results[c].size())});
      }
    }
    return table;
  }

  if (kind == StudyKind::kCensoredCount) {
    table.columns = {"n_observed", "n_censored", "mae_mean", "mae_std", "repetitions"};
  } else {
    table.columns = {"n", "censoring", "mae_mean", "mae_std", "repetitions"};
  }
  for (std::size_t c = 0; c < cells.size(); ++c) {
    const Cell& cell = cells[c];
    if (kind == StudyKind::kCensoredCount) {
      table.rows.push_back(
          MaeRow({static_cast<double>(cell.n_observed), static_cast<double>(cell.n_censored)}, results[c]));
    } else {
      table.rows.push_back(MaeRow({static_cast<double>(cell.n_observed + cell.n_censored), cell.ratio}, results[c]));
    }
  }
  return table;
}

}  // namespace npglm
