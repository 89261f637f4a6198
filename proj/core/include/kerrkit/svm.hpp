#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "kerrkit/kernels.hpp"

namespace kerrkit {

// ---- metrics ------------------------------------------------------------

struct Confusion {
  std::size_t tp = 0, fp = 0, fn = 0, tn = 0;

  std::size_t total() const { return tp + fp + fn + tn; }
  friend bool operator==(const Confusion&, const Confusion&) = default;
};

// Positive class is label 1. F1 is 0 when TP + FP + FN = 0.
double f1_score(const Confusion& c);
double accuracy(const Confusion& c);
Confusion confusion_matrix(const std::vector<int>& truth, const std::vector<int>& predicted);

enum class SplitTag { Train, Test, CrossVal };
std::string to_string(SplitTag t);

struct EvalReport {
  double f1 = 0.0;
  double accuracy = 0.0;
  Confusion confusion;
  SplitTag split_tag = SplitTag::Test;
};

EvalReport evaluate(const std::vector<int>& truth, const std::vector<int>& predicted, SplitTag tag);

// ---- models -------------------------------------------------------------

enum class SolverStatus { Converged, NotConverged };

// Labels are {0, 1} externally and {-1, +1} inside the dual.
struct SvmModel {
  Eigen::VectorXd dual_coefs;  // alpha_i * y_i
  double bias = 0.0;
  std::vector<std::size_t> support_idx;
  double c_reg = 1.0;
  KernelSpec spec;
  std::string train_ref;  // fingerprint of the training Gram and labels

  SolverStatus status = SolverStatus::Converged;
  long iterations = 0;
  double diagonal_shift = 0.0;
  double max_kkt_violation = 0.0;

  Eigen::VectorXd alpha() const { return dual_coefs.cwiseAbs(); }
};

struct SmoOptions {
  double tol = 1e-3;
  // Iteration budget is max_passes * n.
  int max_passes = 1000;
  std::uint64_t seed = 0;
  // Shift a slightly indefinite Gram (min eig in [-1e-8 n, 0)) onto the PSD cone.
  bool shift_indefinite = false;
};

SvmModel train_svm(const Eigen::MatrixXd& gram, const std::vector<int>& labels, double c_reg,
                   const SmoOptions& options = {});
SvmModel train_svm(const GramMatrix& gram, const std::vector<int>& labels, double c_reg,
                   const SmoOptions& options = {});

// Reference solver for n <= 16: accelerated projected gradient followed by
// an exact solve on the identified active set.
SvmModel brute_force_qp(const Eigen::MatrixXd& gram, const std::vector<int>& labels, double c_reg);

struct Prediction {
  std::vector<int> labels;
  Eigen::VectorXd decision;
};

// cross_gram is m x n_train.
Prediction predict(const SvmModel& model, const Eigen::MatrixXd& cross_gram);

// sum(alpha) - 1/2 alpha^T Q alpha.
double dual_objective(const Eigen::MatrixXd& gram, const std::vector<int>& labels,
                      const SvmModel& model);
// 1/2 ||w||^2 + C sum_i max(0, 1 - y_i f(x_i)) with the model's bias.
double primal_objective(const Eigen::MatrixXd& gram, const std::vector<int>& labels,
                        const SvmModel& model);

std::string fingerprint(const Eigen::MatrixXd& gram, const std::vector<int>& labels);

std::string to_json(const SvmModel& model);
std::string to_json(const EvalReport& report);

}  // namespace kerrkit
