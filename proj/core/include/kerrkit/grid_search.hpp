#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "kerrkit/datasets.hpp"
#include "kerrkit/kernels.hpp"
#include "kerrkit/svm.hpp"

namespace kerrkit {

enum class Scenario { TestDriven, CrossValDriven };
std::string to_string(Scenario s);
Scenario parse_scenario(const std::string& s);

// PhasePeriodic onto [0, pi] for phase-encoded and periodic families,
// AmplitudeBox onto [0, 1] for amplitude families, ZScore for RBF.
ScalingMode default_scaling(KernelFamily f);
double default_scaling_span(KernelFamily f);

// Scaled features for every row (scaling fitted on the training rows) and
// the per-sample encoding offsets implied by the noise plan.
struct PreparedData {
  Eigen::MatrixXd features;
  std::vector<int> labels;
  SplitPlan plan;
  ScalingRecord scaling;
  Eigen::MatrixXd offsets;  // empty without encoding noise

  const Eigen::MatrixXd* offsets_ptr() const { return offsets.size() ? &offsets : nullptr; }
  std::vector<int> labels_at(const std::vector<std::size_t>& idx) const;
};

PreparedData prepare(const Dataset& d, const SplitPlan& plan, KernelFamily family,
                     const NoisePlan& noise = {});

struct FitResult {
  SvmModel model;
  EvalReport train;
  EvalReport test;
  Prediction test_prediction;
};

// Gram over all prepared rows, reused by fit_on_gram.
Eigen::MatrixXd full_gram(const PreparedData& data, const KernelSpec& spec, int workers = 1);
FitResult fit_on_gram(const PreparedData& data, const Eigen::MatrixXd& full, const KernelSpec& spec,
                      double c_reg, const SmoOptions& smo = {});
FitResult fit_and_evaluate(const PreparedData& data, const KernelSpec& spec, double c_reg,
                           const SmoOptions& smo = {}, int workers = 1);

struct GridAxes {
  std::vector<KernelSpec> specs;
  std::vector<double> c_reg;
};

// j in {1/2, ..., 5} x sqrt(|lambda|/2) c in {0.1, 0.25, 0.5, 1, 1.5} for the
// Kerr families; see the README for the others.
GridAxes default_grid(KernelFamily f);

struct TraceEntry {
  KernelSpec spec;
  double c_reg = 1.0;
  std::optional<double> cv_f1;  // mean fold F1
  EvalReport test;
  EvalReport train;
};

struct SkippedCell {
  KernelSpec spec;
  std::string reason;
};

struct GridSearchOptions {
  Scenario scenario = Scenario::TestDriven;
  std::uint64_t seed = 0;
  int workers = 1;
  SmoOptions smo;
};

struct GridSearchResult {
  KernelSpec best_spec;
  double best_c_reg = 1.0;
  Scenario scenario = Scenario::TestDriven;
  std::optional<double> best_cv_f1;
  std::optional<EvalReport> cv;  // pooled out-of-fold predictions
  EvalReport test;
  EvalReport train;
  std::vector<TraceEntry> trace;
  std::vector<SkippedCell> skipped;
};

// CrossValDriven requires data.plan.cv_folds.
GridSearchResult grid_search(const PreparedData& data, const GridAxes& grid,
                             const GridSearchOptions& options);
GridSearchResult grid_search(const Dataset& d, const SplitPlan& plan, const GridAxes& grid,
                             const GridSearchOptions& options, const NoisePlan& noise = {});

std::string to_json(const GridSearchResult& r);
// spec columns, scaled_c = sqrt(|lambda|/2) c, c_reg, cv_f1, test_f1, train_f1
std::string trace_csv(const GridSearchResult& r);

}  // namespace kerrkit
