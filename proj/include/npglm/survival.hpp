#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include <Eigen/Core>

namespace npglm {

/// One censored event-time record: features `x`, observation flag `y`
/// (1 = event time observed, 0 = censored) and recorded time `t`.
struct Sample {
  Eigen::VectorXd x;
  int y = 1;
  double t = 0.0;
};

/// Samples of a fixed feature dimension, kept sorted ascending by time. At
/// equal times observed samples precede censored ones; otherwise the input
/// order is preserved so construction is deterministic.
class Dataset {
 public:
  Dataset() = default;
  Dataset(std::vector<Sample> samples, Eigen::Index dim);

  Eigen::Index dim() const noexcept { return dim_; }
  std::size_t size() const noexcept { return samples_.size(); }
  bool empty() const noexcept { return samples_.empty(); }
  std::size_t n_observed() const noexcept { return n_observed_; }
  std::size_t n_censored() const noexcept { return samples_.size() - n_observed_; }

  const std::vector<Sample>& samples() const noexcept { return samples_; }
  const Sample& operator[](std::size_t i) const { return samples_[i]; }
  auto begin() const noexcept { return samples_.begin(); }
  auto end() const noexcept { return samples_.end(); }

  // Feature matrix (N x d) without intercept.
  Eigen::MatrixXd Features() const;
  Eigen::VectorXd Times() const;
  Eigen::VectorXd Observed() const;

  // Builds a new dataset from the samples at `indices` (any order).
  Dataset Subset(std::span<const std::size_t> indices) const;

 private:
  std::vector<Sample> samples_;
  Eigen::Index dim_ = 0;
  std::size_t n_observed_ = 0;
};

// Maps the linear predictor z = w'x to a positive rate.
enum class LinkKind { kExp };

struct LinkFunction {
  LinkKind kind = LinkKind::kExp;

  double Value(double z) const;
  double Derivative(double z) const;
  double SecondDerivative(double z) const;

  std::string_view Tag() const;
  static LinkFunction FromTag(std::string_view tag);
};

/// Piecewise-linear cumulative hazard over strictly increasing knot times.
/// The origin (0, 0) is implicit; queries past the last knot are errors.
class CumulativeHazardTable {
 public:
  CumulativeHazardTable() = default;

  // `times` must be non-decreasing and non-negative; values non-decreasing.
  // Repeated times collapse to one knot holding the largest value.
  CumulativeHazardTable(std::span<const double> times, std::span<const double> values);

  const std::vector<double>& knots() const noexcept { return knots_; }
  const std::vector<double>& values() const noexcept { return values_; }
  bool empty() const noexcept { return knots_.empty(); }
  double last_knot() const { return knots_.empty() ? 0.0 : knots_.back(); }
  double last_value() const { return values_.empty() ? 0.0 : values_.back(); }

  /// H(t) by linear interpolation between the bracketing knots.
  /// Throws kQueryBeyondWindow when t exceeds the last knot.
  double Interpolate(double t) const;

  /// Smallest t with H(t) = target; on a flat stretch this is its left
  /// endpoint. Throws kTargetBeyondWindow when target exceeds H(t_m).
  double Invert(double target) const;

 private:
  std::vector<double> knots_;
  std::vector<double> values_;
};

/// S(t | x) = exp(-g(w'x) H(t)).
double SurvivalFromH(double g_value, double h_at_t);

}  // namespace npglm
