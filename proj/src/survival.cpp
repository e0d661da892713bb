#include "npglm/survival.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "npglm/error.hpp"

namespace npglm {

std::string_view ErrorName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kValidation: return "ValidationError";
    case ErrorCode::kParse: return "ParseError";
    case ErrorCode::kQueryBeyondWindow: return "QueryBeyondWindow";
    case ErrorCode::kTargetBeyondWindow: return "TargetBeyondWindow";
    case ErrorCode::kQuantileBeyondWindow: return "QuantileBeyondWindow";
    case ErrorCode::kInvalidRange: return "InvalidRange";
    case ErrorCode::kDegenerateRiskSet: return "DegenerateRiskSet";
    case ErrorCode::kNonFiniteObjective: return "NonFiniteObjective";
    case ErrorCode::kNoObservedEvents: return "NoObservedEvents";
    case ErrorCode::kNonConvergence: return "NonConvergence";
    case ErrorCode::kUndefinedAtZero: return "UndefinedAtZero";
    case ErrorCode::kSchemaMismatch: return "SchemaMismatch";
    case ErrorCode::kInsufficientNegatives: return "InsufficientNegatives";
    case ErrorCode::kInsufficientObserved: return "InsufficientObserved";
    case ErrorCode::kZeroTruthTime: return "ZeroTruthTime";
    case ErrorCode::kFoldTooSmall: return "FoldTooSmall";
    case ErrorCode::kIo: return "IoError";
  }
  return "Error";
}

Dataset::Dataset(std::vector<Sample> samples, Eigen::Index dim)
    : samples_(std::move(samples)), dim_(dim) {
  Require(dim >= 0, "feature dimension must be non-negative");
  for (std::size_t i = 0; i < samples_.size(); ++i) {
    const Sample& s = samples_[i];
    if (s.x.size() != dim) {
      throw Error(ErrorCode::kValidation, "sample " + std::to_string(i) + " has dimension " +
                                              std::to_string(s.x.size()) + ", expected " +
                                              std::to_string(dim));
    }
    if (s.y != 0 && s.y != 1) {
      throw Error(ErrorCode::kValidation, "sample " + std::to_string(i) + " has y not in {0,1}");
    }
    if (!(s.t >= 0.0) || !std::isfinite(s.t)) {
      throw Error(ErrorCode::kValidation,
                  "sample " + std::to_string(i) + " has negative or non-finite time");
    }
  }
  std::stable_sort(samples_.begin(), samples_.end(), [](const Sample& a, const Sample& b) {
    if (a.t != b.t) return a.t < b.t;
    return a.y > b.y;
  });
  n_observed_ = static_cast<std::size_t>(
      std::count_if(samples_.begin(), samples_.end(), [](const Sample& s) { return s.y == 1; }));
}

Eigen::MatrixXd Dataset::Features() const {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(samples_.size()), dim_);
  for (std::size_t i = 0; i < samples_.size(); ++i) {
    out.row(static_cast<Eigen::Index>(i)) = samples_[i].x.transpose();
  }
  return out;
}

Eigen::VectorXd Dataset::Times() const {
  Eigen::VectorXd out(static_cast<Eigen::Index>(samples_.size()));
  for (std::size_t i = 0; i < samples_.size(); ++i) out[static_cast<Eigen::Index>(i)] = samples_[i].t;
  return out;
}

Eigen::VectorXd Dataset::Observed() const {
  Eigen::VectorXd out(static_cast<Eigen::Index>(samples_.size()));
  for (std::size_t i = 0; i < samples_.size(); ++i) out[static_cast<Eigen::Index>(i)] = samples_[i].y;
  return out;
}

Dataset Dataset::Subset(std::span<const std::size_t> indices) const {
  std::vector<Sample> picked;
  picked.reserve(indices.size());
  for (std::size_t i : indices) picked.push_back(samples_.at(i));
  return Dataset(std::move(picked), dim_);
}

double LinkFunction::Value(double z) const { return std::exp(z); }
double LinkFunction::Derivative(double z) const { return std::exp(z); }
double LinkFunction::SecondDerivative(double z) const { return std::exp(z); }

std::string_view LinkFunction::Tag() const { return "exp"; }

LinkFunction LinkFunction::FromTag(std::string_view tag) {
  if (tag == "exp") return LinkFunction{LinkKind::kExp};
  throw Error(ErrorCode::kParse, "unknown link function '" + std::string(tag) + "'");
}

CumulativeHazardTable::CumulativeHazardTable(std::span<const double> times,
                                             std::span<const double> values) {
  Require(times.size() == values.size(), "knot and value arrays differ in length");
  knots_.reserve(times.size());
  values_.reserve(values.size());
  for (std::size_t i = 0; i < times.size(); ++i) {
    const double t = times[i];
    const double v = values[i];
    Require(std::isfinite(t) && t >= 0.0, "knot times must be finite and non-negative");
    Require(std::isfinite(v) && v >= 0.0, "cumulative hazard values must be finite and >= 0");
    if (!knots_.empty()) {
      Require(t >= knots_.back(), "knot times must be non-decreasing");
      Require(v >= values_.back(), "cumulative hazard values must be non-decreasing");
      if (t == knots_.back()) {
        values_.back() = std::max(values_.back(), v);
        continue;
      }
    }
    knots_.push_back(t);
    values_.push_back(v);
  }
}

double CumulativeHazardTable::Interpolate(double t) const {
  Require(t >= 0.0, "query time must be non-negative");
  Require(!knots_.empty(), "cumulative hazard table is empty");
  if (t > knots_.back()) {
    throw Error(ErrorCode::kQueryBeyondWindow,
                "time " + std::to_string(t) + " is past the last knot " + std::to_string(knots_.back()));
  }
  // First knot strictly greater than t; the bracketing left knot precedes it.
  const auto upper = std::upper_bound(knots_.begin(), knots_.end(), t);
  const auto k = static_cast<std::size_t>(upper - knots_.begin());
  if (k > 0 && knots_[k - 1] == t) return values_[k - 1];
  const double left_t = k == 0 ? 0.0 : knots_[k - 1];
  const double left_h = k == 0 ? 0.0 : values_[k - 1];
  return left_h + (t - left_t) * (values_[k] - left_h) / (knots_[k] - left_t);
}

double CumulativeHazardTable::Invert(double target) const {
  Require(target >= 0.0, "cumulative hazard target must be non-negative");
  Require(!knots_.empty(), "cumulative hazard table is empty");
  if (target > values_.back()) {
    throw Error(ErrorCode::kTargetBeyondWindow, "target " + std::to_string(target) +
                                                    " exceeds H at the last knot " +
                                                    std::to_string(values_.back()));
  }
  if (target == 0.0) return 0.0;
  const auto first_ge = std::lower_bound(values_.begin(), values_.end(), target);
  const auto k = static_cast<std::size_t>(first_ge - values_.begin());
  if (values_[k] == target) return knots_[k];
  const double left_t = k == 0 ? 0.0 : knots_[k - 1];
  const double left_h = k == 0 ? 0.0 : values_[k - 1];
  return (knots_[k] - left_t) * (target - left_h) / (values_[k] - left_h) + left_t;
}

double SurvivalFromH(double g_value, double h_at_t) { return std::exp(-g_value * h_at_t); }

}  // namespace npglm
