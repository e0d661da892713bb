#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "npglm/error.hpp"
#include "npglm/npglm.hpp"
#include "npglm/random.hpp"
#include "npglm/synthetic.hpp"
#include "support/builders.hpp"
#include "support/oracles.hpp"

using namespace npglm;
using npglm::testing::MakeDataset;
using npglm::testing::Vec;

namespace {

// Small random dataset with integer-valued times so ties are common.
Dataset RandomSmallDataset(Rng& rng, std::size_t n, Eigen::Index dim) {
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_int_distribution<int> time(1, 5);
  std::bernoulli_distribution observed(0.7);
  std::vector<Sample> samples(n);
  for (Sample& s : samples) {
    s.x = Eigen::VectorXd(dim);
    for (Eigen::Index j = 0; j < dim; ++j) s.x[j] = normal(rng);
    s.t = time(rng);
    s.y = observed(rng) ? 1 : 0;
  }
  return Dataset(std::move(samples), dim);
}

Eigen::VectorXd RandomVector(Rng& rng, Eigen::Index n, double sd = 1.0) {
  std::normal_distribution<double> normal(0.0, sd);
  Eigen::VectorXd v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = normal(rng);
  return v;
}

NpglmModel ExampleModel() {
  NpglmModel model;
  model.w = Vec({0.0});
  model.table = CumulativeHazardTable(std::vector<double>{1.0, 2.0}, std::vector<double>{0.5, 1.5});
  return model;
}

SyntheticData SmallSynthetic(Distribution dist, std::size_t n_obs, std::size_t n_cens, std::uint64_t seed) {
  SynthConfig config;
  config.distribution = dist;
  config.dim = 4;
  config.n_observed = n_obs;
  config.n_censored = n_cens;
  config.seed = seed;
  return Generate(config);
}

}  // namespace

TEST_SUITE("npglm") {
  TEST_CASE("Breslow examples") {
    const Eigen::VectorXd w0 = Vec({0.0});
    const auto all = BreslowPerSample(MakeDataset({{1, 1, {}}, {2, 1, {}}, {3, 1, {}}}), w0);
    CHECK(all[0] == doctest::Approx(1.0 / 3.0));
    CHECK(all[1] == doctest::Approx(5.0 / 6.0));
    CHECK(all[2] == doctest::Approx(11.0 / 6.0));

    const auto censored = BreslowPerSample(MakeDataset({{1, 1, {}}, {2, 0, {}}}), w0);
    CHECK(censored[0] == doctest::Approx(0.5));
    CHECK(censored[1] == doctest::Approx(0.5));

    const auto none = BreslowPerSample(MakeDataset({{1, 0, {}}, {2, 0, {}}}), w0);
    CHECK(none.isZero(0.0));
  }

  TEST_CASE("Breslow equals the double-loop oracle exactly on small datasets") {
    Rng rng(DeriveSeed(21, "breslow-oracle"));
    for (int trial = 0; trial < 300; ++trial) {
      const std::size_t n = 1 + static_cast<std::size_t>(trial % 8);
      const Dataset data = RandomSmallDataset(rng, n, 2);
      const Eigen::VectorXd w = RandomVector(rng, 3);
      const Eigen::VectorXd got = BreslowPerSample(data, w);
      const auto expected = oracle::BreslowDoubleLoop(data, DesignMatrix(data) * w);
      for (std::size_t i = 0; i < n; ++i) CHECK(got[static_cast<Eigen::Index>(i)] == expected[i]);
    }
  }

  TEST_CASE("Breslow is non-decreasing and jumps only at observed times") {
    Rng rng(DeriveSeed(22, "breslow-shape"));
    for (int trial = 0; trial < 100; ++trial) {
      const Dataset data = RandomSmallDataset(rng, 20, 3);
      const auto table = BreslowHazard(data, RandomVector(rng, 4));
      const auto& knots = table.knots();
      const auto& values = table.values();
      for (std::size_t k = 0; k < knots.size(); ++k) {
        const double left = k == 0 ? 0.0 : values[k - 1];
        CHECK(values[k] >= left);
        if (values[k] > left) {
          bool has_event = false;
          for (const Sample& s : data) has_event |= (s.t == knots[k] && s.y == 1);
          CHECK(has_event);
        }
      }
    }
  }

  TEST_CASE("negative log-likelihood examples") {
    const Dataset data = MakeDataset({{1, 1, {}}, {2, 1, {}}});
    CHECK(NegativeLogLikelihood(data, Vec({0.0}), Vec({0.5, 1.5})).value == doctest::Approx(2.0));
    CHECK(NegativeLogLikelihood(data, Vec({0.0}), Vec({0.0, 0.0})).value == 0.0);
  }

  TEST_CASE("negative log-likelihood matches the direct formula") {
    Rng rng(DeriveSeed(23, "nl-direct"));
    for (int trial = 0; trial < 50; ++trial) {
      const Dataset data = RandomSmallDataset(rng, 12, 3);
      const Eigen::VectorXd w = RandomVector(rng, 4);
      const Eigen::VectorXd h = BreslowPerSample(data, RandomVector(rng, 4));
      CHECK(NegativeLogLikelihood(data, w, h).value ==
            doctest::Approx(oracle::DirectNegativeLogLikelihood(data, w, h)).epsilon(1e-12));
    }
  }

  TEST_CASE("gradient matches central finite differences") {
    Rng rng(DeriveSeed(24, "nl-gradient"));
    for (int trial = 0; trial < 100; ++trial) {
      const Dataset data = RandomSmallDataset(rng, 5, 3);
      const Eigen::VectorXd w = RandomVector(rng, 4, 0.5);
      const Eigen::VectorXd h = BreslowPerSample(data, RandomVector(rng, 4));
      const double l2 = trial % 2 == 0 ? 0.0 : 0.3;
      const auto f = [&](const Eigen::VectorXd& v) { return NegativeLogLikelihood(data, v, h, {}, l2).value; };
      const Eigen::VectorXd numeric = oracle::CentralDifference(f, w);
      CHECK(oracle::RelativeError(NegativeLogLikelihood(data, w, h, {}, l2).gradient, numeric, 1e-3) < 1e-6);
    }
  }

  TEST_CASE("objective is convex in w for fixed H") {
    Rng rng(DeriveSeed(25, "nl-convex"));
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int trial = 0; trial < 200; ++trial) {
      const Dataset data = RandomSmallDataset(rng, 10, 2);
      const Eigen::VectorXd h = BreslowPerSample(data, RandomVector(rng, 3));
      const Eigen::VectorXd w1 = RandomVector(rng, 3, 2.0);
      const Eigen::VectorXd w2 = RandomVector(rng, 3, 2.0);
      const double lambda = unit(rng);
      const double mixed = NegativeLogLikelihood(data, lambda * w1 + (1 - lambda) * w2, h).value;
      const double chord = lambda * NegativeLogLikelihood(data, w1, h).value +
                           (1 - lambda) * NegativeLogLikelihood(data, w2, h).value;
      CHECK(mixed <= chord + 1e-9);
    }
  }

  TEST_CASE("the penalty leaves the intercept alone") {
    const Dataset data = MakeDataset({{1, 1, {0.5}}, {2, 1, {-0.5}}}, 1);
    const Eigen::VectorXd h = Vec({0.0, 0.0});
    CHECK(NegativeLogLikelihood(data, Vec({0.0, 3.0}), h, {}, 1.0).value ==
          doctest::Approx(NegativeLogLikelihood(data, Vec({0.0, 3.0}), h, {}, 0.0).value));
    CHECK(NegativeLogLikelihood(data, Vec({2.0, 0.0}), h, {}, 1.0).value >
          NegativeLogLikelihood(data, Vec({2.0, 0.0}), h, {}, 0.0).value);
  }

  TEST_CASE("one observed sample, intercept only") {
    const Dataset data = MakeDataset({{2.5, 1, {}}});
    const NpglmModel model = Fit(data);
    CHECK(model.report.converged);
    const double g = std::exp(model.w[0]);
    CHECK(model.table.Interpolate(2.5) == doctest::Approx(1.0 / g));
  }

  TEST_CASE("fit is bit-reproducible") {
    const auto data = SmallSynthetic(Distribution::kRayleigh, 150, 50, 31).dataset;
    FitOptions options;
    options.init = InitKind::kSeededRandom;
    options.seed = 8;
    const NpglmModel a = Fit(data, options);
    const NpglmModel b = Fit(data, options);
    CHECK(a.w == b.w);
    CHECK(a.table.values() == b.table.values());
    CHECK(a.report.log_likelihood == b.report.log_likelihood);
  }

  TEST_CASE("outer iterations do not lose log-likelihood") {
    for (Distribution dist : {Distribution::kRayleigh, Distribution::kGompertz}) {
      const auto data = SmallSynthetic(dist, 200, 100, 32).dataset;
      const NpglmModel model = Fit(data);
      REQUIRE(model.report.converged);
      const auto& ll = model.report.log_likelihood;
      for (std::size_t i = 1; i < ll.size(); ++i) CHECK(ll[i] >= ll[i - 1] - 1e-8);
    }
  }

  TEST_CASE("coefficients depend only on time ranks") {
    const auto ray = SmallSynthetic(Distribution::kRayleigh, 150, 100, 33).dataset;
    const auto gom = SmallSynthetic(Distribution::kGompertz, 150, 100, 33).dataset;
    CHECK(Fit(ray).w == Fit(gom).w);
  }

  TEST_CASE("fit recovers coefficients on moderate synthetic data") {
    const auto synth = SmallSynthetic(Distribution::kGompertz, 600, 200, 34);
    const NpglmModel model = Fit(synth.dataset);
    const double mae = (model.w.head(4) - synth.truth.w).cwiseAbs().mean();
    CHECK(mae < 0.15);
  }

  TEST_CASE("non-convergence carries the partial model") {
    const auto data = SmallSynthetic(Distribution::kRayleigh, 100, 0, 35).dataset;
    FitOptions options;
    options.max_outer_iterations = 1;
    try {
      Fit(data, options);
      FAIL("expected non-convergence");
    } catch (const NonConvergenceError& e) {
      CHECK(e.code() == ErrorCode::kNonConvergence);
      CHECK(e.partial().w.size() == 5);
      CHECK(e.partial().report.iterations == 1);
      CHECK_FALSE(e.partial().table.empty());
    }
  }

  TEST_CASE("fit preconditions") {
    try {
      Fit(MakeDataset({{1, 0, {}}, {2, 0, {}}}));
      FAIL("expected an error");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::kNoObservedEvents);
    }
    FitOptions bad;
    bad.w_tolerance = 0.0;
    CHECK_THROWS_AS(Fit(MakeDataset({{1, 1, {}}}), bad), Error);
    bad = {};
    bad.l2_penalty = -1.0;
    CHECK_THROWS_AS(Fit(MakeDataset({{1, 1, {}}}), bad), Error);
  }

  TEST_CASE("ranged probability examples") {
    const NpglmModel model = ExampleModel();
    const Eigen::VectorXd x(0);
    CHECK(RangedProbability(model, x, 1.5, 1.5) == 0.0);
    CHECK(RangedProbability(model, x, 1.0, 2.0) == doctest::Approx(0.38340).epsilon(1e-5));
    CHECK(RangedProbability(model, x, 0.0, 1.7) == doctest::Approx(1.0 - std::exp(-model.table.Interpolate(1.7))));
    try {
      RangedProbability(model, x, 2.0, 1.0);
      FAIL("expected an error");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::kInvalidRange);
    }
  }

  TEST_CASE("quantile examples") {
    NpglmModel model = ExampleModel();
    const Eigen::VectorXd x(0);
    CHECK(Quantile(model, x, 0.0) == 0.0);
    CHECK(Quantile(model, x, 0.5) == doctest::Approx(1.1931).epsilon(1e-4));
    try {
      Quantile(model, x, 0.9);
      FAIL("expected an error");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::kQuantileBeyondWindow);
    }
    model.w[0] = 1.0;  // g = e, so the 0.9 target fits under H(t_m)
    const double t90 = Quantile(model, x, 0.9);
    CHECK(std::abs(RangedProbability(model, x, 0.0, t90) - 0.9) <= 1e-9);
  }

  TEST_CASE("quantile and ranged probability agree") {
    const auto synth = SmallSynthetic(Distribution::kGompertz, 300, 100, 36);
    const NpglmModel model = Fit(synth.dataset);
    Rng rng(DeriveSeed(36, "consistency"));
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    int checked = 0;
    for (int trial = 0; trial < 500; ++trial) {
      const Eigen::VectorXd x = RandomVector(rng, 4);
      double a = unit(rng), b = unit(rng);
      if (a > b) std::swap(a, b);
      try {
        const double ta = Quantile(model, x, a);
        const double tb = Quantile(model, x, b);
        CHECK(std::abs(RangedProbability(model, x, ta, tb) - (b - a)) <= 1e-9);
        ++checked;
      } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::kQuantileBeyondWindow);
      }
    }
    CHECK(checked > 100);
  }
}
