#pragma once

#include <vector>

#include <Eigen/Core>

#include "npglm/survival.hpp"

namespace npglm {

/// Column z-scoring with population standard deviation. Columns with zero
/// variance are dropped. A default-constructed Standardizer is the identity.
class Standardizer {
 public:
  Standardizer() = default;
  Standardizer(Eigen::VectorXd mean, Eigen::VectorXd scale, std::vector<Eigen::Index> kept);

  static Standardizer Fit(const Eigen::MatrixXd& features);
  static Standardizer Fit(const Dataset& dataset) { return Fit(dataset.Features()); }

  bool identity() const noexcept { return mean_.size() == 0; }
  Eigen::Index input_dim() const noexcept { return mean_.size(); }
  Eigen::Index output_dim() const noexcept { return static_cast<Eigen::Index>(kept_.size()); }

  const Eigen::VectorXd& mean() const noexcept { return mean_; }
  const Eigen::VectorXd& scale() const noexcept { return scale_; }
  const std::vector<Eigen::Index>& kept() const noexcept { return kept_; }
  std::vector<Eigen::Index> dropped() const;

  Eigen::VectorXd Apply(const Eigen::VectorXd& raw) const;
  Dataset Apply(const Dataset& dataset) const;

 private:
  Eigen::VectorXd mean_;
  Eigen::VectorXd scale_;
  std::vector<Eigen::Index> kept_;
};

}  // namespace npglm
