#include "npglm/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>

#include "npglm/error.hpp"
#include "npglm/random.hpp"

namespace npglm {

std::string_view DistributionName(Distribution dist) {
  switch (dist) {
    case Distribution::kRayleigh: return "rayleigh";
    case Distribution::kGompertz: return "gompertz";
    case Distribution::kExponential: return "exponential";
  }
  return "unknown";
}

Distribution ParseDistribution(std::string_view name) {
  if (name == "rayleigh" || name == "ray") return Distribution::kRayleigh;
  if (name == "gompertz" || name == "gom") return Distribution::kGompertz;
  if (name == "exponential" || name == "exp") return Distribution::kExponential;
  throw Error(ErrorCode::kValidation, "unknown distribution '" + std::string(name) + "'");
}

double SampleEventTime(Distribution dist, double alpha, double u) {
  // -ln(1 - u) is the unit-exponential draw E; solve alpha * H(t) = E.
  const double e = -std::log1p(-u);
  switch (dist) {
    case Distribution::kRayleigh: return std::sqrt(2.0 * e / alpha);
    case Distribution::kGompertz: return std::log1p(e / alpha);
    case Distribution::kExponential: return e / alpha;
  }
  return 0.0;
}

double TrueCumulativeHazard(Distribution dist, double t) {
  switch (dist) {
    case Distribution::kRayleigh: return 0.5 * t * t;
    case Distribution::kGompertz: return std::expm1(t);
    case Distribution::kExponential: return t;
  }
  return 0.0;
}

SyntheticData Generate(const SynthConfig& config, const std::optional<GroundTruth>& fixed_truth) {
  Require(config.dim >= 1, "synthetic feature dimension must be >= 1");
  Require(config.n_observed >= 1, "synthetic data needs at least one observed sample");

  Rng rng(config.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);

  GroundTruth truth;
  truth.w.resize(config.dim);
  for (Eigen::Index j = 0; j < config.dim; ++j) truth.w[j] = normal(rng);
  truth.b = normal(rng);
  if (fixed_truth) {
    Require(fixed_truth->w.size() == config.dim, "fixed ground truth has wrong dimension");
    truth = *fixed_truth;
  }

  const std::size_t n = config.n_observed + config.n_censored;
  std::vector<Sample> drawn(n);
  for (Sample& s : drawn) {
    s.x.resize(config.dim);
    for (Eigen::Index j = 0; j < config.dim; ++j) s.x[j] = normal(rng);
    const double alpha = std::exp(truth.w.dot(s.x) + truth.b);
    s.t = SampleEventTime(config.distribution, alpha, uniform(rng));
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return drawn[a].t < drawn[b].t; });

  SyntheticData out;
  out.truth = std::move(truth);
  out.drawn_times.reserve(n);
  std::vector<Sample> samples;
  samples.reserve(n);
  const double window_end = drawn[order[config.n_observed - 1]].t;
  for (std::size_t rank = 0; rank < n; ++rank) {
    Sample s = std::move(drawn[order[rank]]);
    out.drawn_times.push_back(s.t);
    if (rank >= config.n_observed) {
      s.y = 0;
      s.t = window_end;
    }
    samples.push_back(std::move(s));
  }
  out.dataset = Dataset(std::move(samples), config.dim);
  return out;
}

}  // namespace npglm
