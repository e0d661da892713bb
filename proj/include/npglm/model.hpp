#pragma once

#include <string>
#include <variant>

#include "npglm/baselines.hpp"
#include "npglm/npglm.hpp"

namespace npglm {

using AnyModel = std::variant<NpglmModel, ParametricModel>;

// "npglm" or the parametric family tag.
std::string ModelTag(const AnyModel& model);

double Quantile(const AnyModel& model, const Eigen::VectorXd& raw_x, double alpha);
double RangedProbability(const AnyModel& model, const Eigen::VectorXd& raw_x, double t_alpha, double t_beta);

const Standardizer& Normalization(const AnyModel& model);
void SetNormalization(AnyModel& model, Standardizer normalization);

}  // namespace npglm
