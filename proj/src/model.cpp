#include "npglm/model.hpp"

namespace npglm {

std::string ModelTag(const AnyModel& model) {
  if (const auto* p = std::get_if<ParametricModel>(&model)) return std::string(FamilyTag(p->family));
  return "npglm";
}

double Quantile(const AnyModel& model, const Eigen::VectorXd& raw_x, double alpha) {
  return std::visit([&](const auto& m) { return Quantile(m, raw_x, alpha); }, model);
}

double RangedProbability(const AnyModel& model, const Eigen::VectorXd& raw_x, double t_alpha, double t_beta) {
  return std::visit([&](const auto& m) { return RangedProbability(m, raw_x, t_alpha, t_beta); }, model);
}

const Standardizer& Normalization(const AnyModel& model) {
  return std::visit([](const auto& m) -> const Standardizer& { return m.normalization; }, model);
}

void SetNormalization(AnyModel& model, Standardizer normalization) {
  std::visit([&](auto& m) { m.normalization = std::move(normalization); }, model);
}

}  // namespace npglm
