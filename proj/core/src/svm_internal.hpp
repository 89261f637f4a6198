#pragma once

#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "kerrkit/svm.hpp"

namespace kerrkit::detail {

std::vector<double> signed_labels(const std::vector<int>& labels, Eigen::Index n);
void require_symmetric(const Eigen::MatrixXd& k);

// Bias from the dual gradient Q alpha - e: average over free variables,
// midpoint of the feasible interval when none are free.
double bias_from_gradient(const Eigen::VectorXd& grad, const Eigen::VectorXd& alpha,
                          const std::vector<double>& y, double c);

void finish_model(SvmModel& m, const Eigen::MatrixXd& k, const std::vector<int>& labels,
                  const Eigen::VectorXd& alpha, const std::vector<double>& y, double c);

nlohmann::json report_to_json(const EvalReport& r);

}  // namespace kerrkit::detail
