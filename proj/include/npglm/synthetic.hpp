#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "npglm/survival.hpp"

namespace npglm {

// Exponential is not one of the two studied generators; it exists so the
// constant-hazard case can be checked against a known H(t) = t.
enum class Distribution { kRayleigh, kGompertz, kExponential };

std::string_view DistributionName(Distribution dist);
Distribution ParseDistribution(std::string_view name);

struct SynthConfig {
  Distribution distribution = Distribution::kRayleigh;
  Eigen::Index dim = 10;
  std::size_t n_observed = 0;
  std::size_t n_censored = 0;
  std::uint64_t seed = 0;
};

struct GroundTruth {
  Eigen::VectorXd w;
  double b = 0.0;
};

struct SyntheticData {
  Dataset dataset;
  GroundTruth truth;
  // Event times as drawn, aligned with dataset order. Censored samples
  // record the largest observed time instead.
  std::vector<double> drawn_times;
};

/// Draws a GLM ground truth (unless `fixed_truth` is given), then N feature
/// vectors and event times by inverse-CDF sampling. The N_c largest times are
/// censored at the largest observed time.
SyntheticData Generate(const SynthConfig& config,
                       const std::optional<GroundTruth>& fixed_truth = std::nullopt);

// Inverse CDF of T given rate alpha = g(w'x + b), evaluated at u in [0, 1).
double SampleEventTime(Distribution dist, double alpha, double u);

// Baseline H(t) of the generating family: t^2/2, e^t - 1 or t.
double TrueCumulativeHazard(Distribution dist, double t);

}  // namespace npglm
