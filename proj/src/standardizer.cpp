#include "npglm/standardizer.hpp"

#include <cmath>

#include "npglm/error.hpp"

namespace npglm {

Standardizer::Standardizer(Eigen::VectorXd mean, Eigen::VectorXd scale, std::vector<Eigen::Index> kept)
    : mean_(std::move(mean)), scale_(std::move(scale)), kept_(std::move(kept)) {
  Require(mean_.size() == scale_.size(), "normalization mean/scale length mismatch");
  for (Eigen::Index j : kept_) {
    Require(j >= 0 && j < mean_.size(), "normalization keeps an out-of-range column");
    Require(scale_[j] > 0.0, "normalization keeps a zero-scale column");
  }
}

Standardizer Standardizer::Fit(const Eigen::MatrixXd& features) {
  Require(features.rows() >= 1, "cannot fit normalization on zero rows");
  const double n = static_cast<double>(features.rows());
  Eigen::VectorXd mean = features.colwise().sum().transpose() / n;
  Eigen::VectorXd scale(features.cols());
  std::vector<Eigen::Index> kept;
  for (Eigen::Index j = 0; j < features.cols(); ++j) {
    const double var = (features.col(j).array() - mean[j]).square().sum() / n;
    scale[j] = std::sqrt(var);
    if (scale[j] > 0.0) kept.push_back(j);
  }
  return Standardizer(std::move(mean), std::move(scale), std::move(kept));
}

std::vector<Eigen::Index> Standardizer::dropped() const {
  std::vector<Eigen::Index> out;
  std::size_t next = 0;
  for (Eigen::Index j = 0; j < mean_.size(); ++j) {
    if (next < kept_.size() && kept_[next] == j) {
      ++next;
    } else {
      out.push_back(j);
    }
  }
  return out;
}

Eigen::VectorXd Standardizer::Apply(const Eigen::VectorXd& raw) const {
  if (identity()) return raw;
  Require(raw.size() == mean_.size(), "feature vector has dimension " + std::to_string(raw.size()) +
                                          ", model expects " + std::to_string(mean_.size()));
  Eigen::VectorXd out(output_dim());
  for (std::size_t k = 0; k < kept_.size(); ++k) {
    const Eigen::Index j = kept_[k];
    out[static_cast<Eigen::Index>(k)] = (raw[j] - mean_[j]) / scale_[j];
  }
  return out;
}

Dataset Standardizer::Apply(const Dataset& dataset) const {
  if (identity()) return dataset;
  std::vector<Sample> samples;
  samples.reserve(dataset.size());
  for (const Sample& s : dataset) samples.push_back({Apply(s.x), s.y, s.t});
  return Dataset(std::move(samples), output_dim());
}

}  // namespace npglm
