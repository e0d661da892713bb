#pragma once

#include <algorithm>
#include <cmath>

#include <Eigen/Core>

#include "npglm/npglm.hpp"

namespace npglm::detail {

inline double Clamp(double z) { return std::clamp(z, -kLinearPredictorClamp, kLinearPredictorClamp); }

// NL(w) over a fixed design. Value and derivatives are scaled by `scale`.
class HazardObjective {
 public:
  HazardObjective(const Eigen::MatrixXd& design, const Eigen::VectorXd& y, const Eigen::VectorXd& h,
                  const LinkFunction& link, double l2, double scale)
      : design_(design), y_(y), h_(h), link_(link), l2_(l2), scale_(scale) {}

  double operator()(const Eigen::VectorXd& w, Eigen::VectorXd* gradient, Eigen::MatrixXd* hessian,
                    bool* clamped = nullptr) const {
    const Eigen::VectorXd z = design_ * w;
    const Eigen::Index n = z.size();
    const Eigen::Index p = w.size();
    Eigen::VectorXd first(n);
    Eigen::VectorXd second(n);
    double value = 0.0;
    bool any_clamped = false;
    for (Eigen::Index i = 0; i < n; ++i) {
      const double zc = Clamp(z[i]);
      any_clamped |= zc != z[i];
      const double g = link_.Value(zc);
      const double dg = link_.Derivative(zc);
      const double d2g = link_.SecondDerivative(zc);
      value += g * h_[i] - y_[i] * std::log(g);
      first[i] = dg * h_[i] - y_[i] * dg / g;
      second[i] = d2g * h_[i] - y_[i] * (d2g * g - dg * dg) / (g * g);
    }
    const auto coefs = w.head(p - 1);
    value += 0.5 * l2_ * coefs.squaredNorm();
    if (clamped != nullptr) *clamped = any_clamped;
    if (gradient != nullptr) {
      *gradient = design_.transpose() * first;
      gradient->head(p - 1) += l2_ * coefs;
      *gradient *= scale_;
    }
    if (hessian != nullptr) {
      *hessian = design_.transpose() * second.asDiagonal() * design_;
      hessian->diagonal().head(p - 1).array() += l2_;
      *hessian *= scale_;
    }
    return value * scale_;
  }

 private:
  const Eigen::MatrixXd& design_;
  const Eigen::VectorXd& y_;
  const Eigen::VectorXd& h_;
  LinkFunction link_;
  double l2_;
  double scale_;
};

}  // namespace npglm::detail
