#include <doctest.h>

#include <cmath>
#include <set>
#include <vector>

#include "npglm/error.hpp"
#include "npglm/evaluation.hpp"
#include "npglm/random.hpp"
#include "npglm/standardizer.hpp"
#include "npglm/synthetic.hpp"
#include "support/builders.hpp"

using namespace npglm;
using npglm::testing::MakeDataset;
using npglm::testing::Vec;

namespace {

SyntheticData Synthetic(Distribution dist, std::size_t n_obs, std::size_t n_cens, std::uint64_t seed,
                        Eigen::Index dim = 4) {
  SynthConfig config;
  config.distribution = dist;
  config.dim = dim;
  config.n_observed = n_obs;
  config.n_censored = n_cens;
  config.seed = seed;
  return Generate(config);
}

ErrorCode CodeOf(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::kIo;
}

}  // namespace

TEST_SUITE("evaluation") {
  TEST_CASE("point metric examples") {
    const std::vector<double> p1{1, 3}, t1{2, 2};
    auto m = ComputePointMetrics(p1, t1);
    CHECK(m.mae == 1.0);
    CHECK(m.mre == 0.5);
    m = ComputePointMetrics(t1, t1);
    CHECK(m.mae == 0.0);
    CHECK(m.mre == 0.0);
    const std::vector<double> p2{10}, t2{5};
    m = ComputePointMetrics(p2, t2);
    CHECK(m.mae == 5.0);
    CHECK(m.mre == 1.0);
  }

  TEST_CASE("zero truth times are left out of the relative error") {
    const std::vector<double> p{1, 4}, t{0, 2};
    const auto m = ComputePointMetrics(p, t);
    CHECK(m.mae == 1.5);
    CHECK(m.mre == 1.0);
    CHECK(m.mre_skipped == 1);
    const std::vector<double> zero{0};
    CHECK(CodeOf([&] { ComputePointMetrics(zero, zero); }) == ErrorCode::kZeroTruthTime);
  }

  TEST_CASE("stratified folds") {
    const Dataset data = MakeDataset({{1, 1, {}}, {2, 1, {}}, {3, 1, {}}, {4, 1, {}}, {5, 1, {}},
                                      {5, 0, {}}, {5, 0, {}}, {5, 0, {}}, {5, 0, {}}, {5, 0, {}}});
    const auto fold = StratifiedFolds(data, 2, 17);
    for (int f = 0; f < 2; ++f) {
      int observed = 0, censored = 0;
      for (std::size_t i = 0; i < data.size(); ++i) {
        if (fold[i] == f) (data[i].y == 1 ? observed : censored)++;
      }
      CHECK(observed >= 2);
      CHECK(observed <= 3);
      CHECK(censored >= 2);
      CHECK(censored <= 3);
    }
    CHECK(fold == StratifiedFolds(data, 2, 17));
    CHECK(CodeOf([&] { StratifiedFolds(data, 1, 17); }) == ErrorCode::kValidation);
    CHECK(CodeOf([&] { StratifiedFolds(data, 6, 17); }) == ErrorCode::kFoldTooSmall);
  }

  TEST_CASE("folds partition the dataset with balanced sizes") {
    const auto data = Synthetic(Distribution::kRayleigh, 37, 23, 61).dataset;
    for (int k : {2, 3, 7, 10}) {
      const auto fold = StratifiedFolds(data, k, 5);
      REQUIRE(fold.size() == data.size());
      std::vector<int> observed(static_cast<std::size_t>(k)), total(static_cast<std::size_t>(k));
      for (std::size_t i = 0; i < data.size(); ++i) {
        REQUIRE(fold[i] >= 0);
        REQUIRE(fold[i] < k);
        ++total[static_cast<std::size_t>(fold[i])];
        observed[static_cast<std::size_t>(fold[i])] += data[i].y;
      }
      const auto [olo, ohi] = std::minmax_element(observed.begin(), observed.end());
      const auto [tlo, thi] = std::minmax_element(total.begin(), total.end());
      CHECK(*ohi - *olo <= 1);
      CHECK(*thi - *tlo <= 1);
    }
  }

  TEST_CASE("summary uses the sample standard deviation") {
    const std::vector<double> v{1, 2, 3, 4};
    const Summary s = Summarize(v);
    CHECK(s.mean == 2.5);
    CHECK(s.std == doctest::Approx(std::sqrt(5.0 / 3.0)));
    const std::vector<double> one{7};
    CHECK(Summarize(one).std == 0.0);
  }

  TEST_CASE("interval accuracy edge cases") {
    ParametricModel model;
    model.family = Family::kExponential;
    model.w = Vec({0.0});
    const AnyModel any = model;
    std::vector<Sample> samples;
    for (double t : {0.01, 0.02, 0.03}) samples.push_back({Eigen::VectorXd(0), 1, t});
    // Every truth sits below the 25% quantile ln(4/3).
    CHECK(CiAccuracy(any, samples, 0.25, 0.75, 10.0).accuracy == 0.0);
    // A vanishing interval around the median catches nothing.
    samples = {{Eigen::VectorXd(0), 1, 0.3}, {Eigen::VectorXd(0), 1, 1.2}};
    CHECK(CiAccuracy(any, samples, 0.5 - 1e-12, 0.5, 10.0).accuracy == 0.0);
    CHECK_THROWS_AS(CiAccuracy(any, samples, 0.6, 0.4, 10.0), Error);
  }

  TEST_CASE("interval accuracy is monotone in interval width") {
    const auto train = Synthetic(Distribution::kGompertz, 400, 100, 62).dataset;
    const auto test = Synthetic(Distribution::kGompertz, 300, 0, 63).dataset;
    const AnyModel model = Fit(train);
    const double window_end = train.samples().back().t;
    double previous = -1.0;
    for (double half = 0.0; half < 0.45; half += 0.05) {
      const double acc = CiAccuracy(model, test.samples(), 0.5 - half - 1e-9, 0.5 + half, window_end).accuracy;
      CHECK(acc >= previous);
      CHECK(acc >= 0.0);
      CHECK(acc <= 100.0);
      previous = acc;
    }
  }

  TEST_CASE("the true model is calibrated") {
    SynthConfig config;
    config.distribution = Distribution::kRayleigh;
    config.dim = 4;
    config.n_observed = 20000;
    config.seed = DeriveSeed(64, "calibration");
    const auto data = Generate(config);
    ParametricModel truth;
    truth.family = Family::kRayleigh;
    truth.w.resize(5);
    truth.w << data.truth.w, data.truth.b;
    const double acc = CiAccuracy(AnyModel(truth), data.dataset.samples(), 0.25, 0.75, 1e9).accuracy;
    CHECK(std::abs(acc - 50.0) < 1.5);
  }

  TEST_CASE("k-fold report aggregates its folds") {
    const auto data = Synthetic(Distribution::kGompertz, 120, 80, 65).dataset;
    std::vector<ModelConfig> models{ParseModelConfig("npglm"), ParseModelConfig("gom"), ParseModelConfig("npglm")};
    const EvalReport report = KfoldEvaluate(data, models, 4, 9);
    REQUIRE(report.models.size() == 3);
    CHECK(report.k == 4);
    for (const ModelReport& row : report.models) {
      REQUIRE(row.folds.size() == 4);
      std::vector<double> mae;
      std::size_t tested = 0;
      for (const FoldMetrics& f : row.folds) {
        mae.push_back(f.mae);
        tested += f.test_observed;
        for (double acc : f.ci) {
          CHECK(acc >= 0.0);
          CHECK(acc <= 100.0);
        }
      }
      CHECK(row.mae.mean == Summarize(mae).mean);
      CHECK(tested == data.n_observed());
      CHECK(row.ci.size() == 3);
    }
    CHECK(report.models[0].mae.mean == report.models[2].mae.mean);
    CHECK(report.models[0].ci[1].mean == report.models[2].ci[1].mean);
  }

  TEST_CASE("parallel evaluation matches serial evaluation") {
    const auto data = Synthetic(Distribution::kRayleigh, 100, 50, 66).dataset;
    const std::vector<ModelConfig> models{ParseModelConfig("npglm"), ParseModelConfig("exp")};
    KfoldOptions serial, parallel;
    parallel.jobs = 3;
    const auto a = KfoldEvaluate(data, models, 5, 3, serial);
    const auto b = KfoldEvaluate(data, models, 5, 3, parallel);
    for (std::size_t m = 0; m < 2; ++m) {
      for (std::size_t f = 0; f < 5; ++f) {
        CHECK(a.models[m].folds[f].mae == b.models[m].folds[f].mae);
        CHECK(a.models[m].folds[f].ci == b.models[m].folds[f].ci);
      }
    }
  }

  TEST_CASE("standardized evaluation stores raw-scale models") {
    const auto synth = Synthetic(Distribution::kRayleigh, 200, 100, 67);
    std::vector<Sample> shifted;
    for (Sample s : synth.dataset) {
      s.x = 3.0 * s.x.array() + 10.0;
      shifted.push_back(s);
    }
    const Dataset raw(std::move(shifted), 4);
    KfoldOptions options;
    options.standardize = true;
    const auto report = KfoldEvaluate(raw, {ParseModelConfig("npglm")}, 3, 4, options);
    const auto plain = KfoldEvaluate(synth.dataset, {ParseModelConfig("npglm")}, 3, 4);
    CHECK(report.models[0].mae.mean == doctest::Approx(plain.models[0].mae.mean).epsilon(0.05));
  }

  TEST_CASE("studies produce reproducible tables") {
    StudyConfig config;
    config.dim = 3;
    config.n_values = {60, 120};
    config.censoring_ratios = {0.0, 0.5};
    config.repetitions = 3;
    config.seed = 68;
    const auto a = RunStudy(StudyKind::kMaeVsN, config);
    CHECK(a.columns == std::vector<std::string>{"n", "censoring", "mae_mean", "mae_std", "repetitions"});
    CHECK(a.rows.size() == 4);
    config.jobs = 2;
    CHECK(RunStudy(StudyKind::kMaeVsN, config).rows == a.rows);

    const auto curve = RunStudy(StudyKind::kConvergence, config);
    CHECK(curve.columns.size() == 4);
    CHECK(curve.rows.size() >= 4);

    config.observed_counts = {50};
    config.censored_counts = {0, 25};
    const auto counts = RunStudy(StudyKind::kCensoredCount, config);
    REQUIRE(counts.rows.size() == 2);
    CHECK(counts.rows[1][1] == 25.0);
    CHECK(ParseStudyKind("censoring-ratio") == StudyKind::kCensoringRatio);
    CHECK_THROWS_AS(ParseStudyKind("bogus"), Error);
  }

  TEST_CASE("coefficient error leaves out the intercept") {
    CHECK(CoefficientMae(Vec({1.0, 2.0, 100.0}), Vec({0.0, 4.0})) == 1.5);
    CHECK_THROWS_AS(CoefficientMae(Vec({1.0}), Vec({1.0})), Error);
  }

  TEST_CASE("parallel for visits every index once") {
    std::vector<int> hits(1000, 0);
    ParallelFor(hits.size(), 4, [&](std::size_t i) { ++hits[i]; });
    CHECK(std::count(hits.begin(), hits.end(), 1) == 1000);
    CHECK_THROWS_AS(ParallelFor(10, 2, [](std::size_t i) {
                      if (i == 7) throw Error(ErrorCode::kValidation, "boom");
                    }),
                    Error);
  }
}

TEST_SUITE("standardizer") {
  TEST_CASE("z-score example with population standard deviation") {
    Eigen::MatrixXd x(2, 1);
    x << 1, 3;
    const auto s = Standardizer::Fit(x);
    CHECK(s.Apply(Vec({1.0}))[0] == doctest::Approx(-1.0));
    CHECK(s.Apply(Vec({3.0}))[0] == doctest::Approx(1.0));
  }

  TEST_CASE("constant columns are dropped") {
    Eigen::MatrixXd x(3, 3);
    x << 1, 5, 0, 2, 5, 1, 3, 5, 2;
    const auto s = Standardizer::Fit(x);
    CHECK(s.output_dim() == 2);
    CHECK(s.dropped() == std::vector<Eigen::Index>{1});
    CHECK(s.Apply(Vec({2.0, 99.0, 1.0})).isZero(1e-15));
  }

  TEST_CASE("identity normalization passes vectors through") {
    const Standardizer s;
    CHECK(s.identity());
    CHECK(s.Apply(Vec({4.0, -1.0})) == Vec({4.0, -1.0}));
  }

  TEST_CASE("applying to a dataset yields standardized columns") {
    const auto data = Synthetic(Distribution::kRayleigh, 50, 10, 69).dataset;
    const auto s = Standardizer::Fit(data);
    const Eigen::MatrixXd z = s.Apply(data).Features();
    for (Eigen::Index j = 0; j < z.cols(); ++j) {
      CHECK(std::abs(z.col(j).mean()) < 1e-10);
      CHECK(std::abs(z.col(j).squaredNorm() / z.rows() - 1.0) < 1e-10);
    }
  }
}
