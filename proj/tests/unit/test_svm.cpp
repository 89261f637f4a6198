#include <cmath>
#include <numbers>
#include <random>
#include <set>

#include <gtest/gtest.h>
#include <json.hpp>

#include "kerrkit/datasets.hpp"
#include "kerrkit/error.hpp"
#include "kerrkit/grid_search.hpp"
#include "kerrkit/svm.hpp"

namespace kerrkit {
namespace {

Eigen::MatrixXd rbf_gram(const Eigen::MatrixXd& x, double sigma) { return gram(x, rbf_spec(sigma)).values; }

struct Instance {
  Eigen::MatrixXd x;
  Eigen::MatrixXd k;
  std::vector<int> labels;
};

Instance random_instance(std::mt19937_64& rng, int n) {
  std::normal_distribution<double> g(0.0, 1.0);
  Instance in;
  in.x.resize(n, 2);
  for (int i = 0; i < n; ++i) {
    in.labels.push_back(i % 2);
    in.x(i, 0) = g(rng) + (i % 2 ? 0.8 : -0.8);
    in.x(i, 1) = g(rng);
  }
  in.k = rbf_gram(in.x, 1.0);
  return in;
}

TEST(Metrics, ConfusionArithmetic) {
  const Confusion c{40, 10, 10, 40};
  EXPECT_DOUBLE_EQ(f1_score(c), 0.8);
  EXPECT_DOUBLE_EQ(accuracy(c), 0.8);
  EXPECT_DOUBLE_EQ(f1_score(Confusion{0, 0, 0, 7}), 0.0);
}

TEST(Metrics, PerfectAndConstantPredictors) {
  const std::vector<int> truth = {0, 1, 1, 0, 1, 0};
  const auto perfect = evaluate(truth, truth, SplitTag::Test);
  EXPECT_DOUBLE_EQ(perfect.f1, 1.0);
  EXPECT_DOUBLE_EQ(perfect.accuracy, 1.0);
  const auto ones = evaluate(truth, std::vector<int>(6, 1), SplitTag::Train);
  EXPECT_DOUBLE_EQ(ones.accuracy, 0.5);
  EXPECT_EQ(ones.confusion, (Confusion{3, 3, 0, 0}));
  EXPECT_THROW(confusion_matrix(truth, {1, 0}), DomainError);
}

TEST(Smo, TwoPointIdentityGram) {
  const Eigen::MatrixXd k = Eigen::MatrixXd::Identity(2, 2);
  const SvmModel m = train_svm(k, {0, 1}, 10.0);
  EXPECT_NEAR(m.alpha()(0), 1.0, 1e-9);
  EXPECT_NEAR(m.alpha()(1), 1.0, 1e-9);
  EXPECT_NEAR(m.bias, 0.0, 1e-9);
  EXPECT_EQ(m.support_idx.size(), 2u);
  EXPECT_EQ(m.status, SolverStatus::Converged);
  const SvmModel q = brute_force_qp(k, {0, 1}, 10.0);
  EXPECT_NEAR((q.alpha() - m.alpha()).cwiseAbs().maxCoeff(), 0.0, 1e-9);
  EXPECT_NEAR(q.bias, m.bias, 1e-9);
}

TEST(Smo, SeparableToyHasZeroTrainingError) {
  Eigen::MatrixXd x(4, 1);
  x << -2.0, -1.0, 1.0, 2.0;
  const Eigen::MatrixXd k = x * x.transpose();
  const std::vector<int> y = {0, 0, 1, 1};
  const SvmModel m = train_svm(k, y, 1e3);
  const auto pred = predict(m, k.leftCols(m.dual_coefs.size()));
  EXPECT_EQ(pred.labels, y);
  EXPECT_DOUBLE_EQ(evaluate(y, pred.labels, SplitTag::Train).f1, 1.0);
}

TEST(Smo, AgreesWithReferenceQp) {
  std::mt19937_64 rng(123);
  for (int t = 0; t < 25; ++t) {
    const int n = 4 + t % 9;
    const Instance in = random_instance(rng, n);
    SmoOptions o;
    o.tol = 1e-12;  // the gap scales like n * c * tol
    o.max_passes = 100000;
    const double c = std::pow(10.0, static_cast<double>(t % 4) - 1.0);
    const SvmModel smo = train_svm(in.k, in.labels, c, o);
    const SvmModel qp = brute_force_qp(in.k, in.labels, c);
    EXPECT_NEAR(dual_objective(in.k, in.labels, smo), dual_objective(in.k, in.labels, qp), 1e-6);
    const double gap = primal_objective(in.k, in.labels, smo) - dual_objective(in.k, in.labels, smo);
    EXPECT_LT(std::abs(gap), 1e-8) << "t=" << t << " n=" << n << " c=" << c;
    const double qp_gap = primal_objective(in.k, in.labels, qp) - dual_objective(in.k, in.labels, qp);
    EXPECT_LT(std::abs(qp_gap), 1e-8) << "t=" << t;
    EXPECT_EQ(predict(smo, in.k).labels, predict(qp, in.k).labels);
    for (Eigen::Index i = 0; i < n; ++i) {
      EXPECT_GE(smo.alpha()(i), 0.0);
      EXPECT_LE(smo.alpha()(i), c);
    }
  }
}

TEST(Smo, MarginSupportVectorsSatisfyKkt) {
  std::mt19937_64 rng(5);
  const Instance in = random_instance(rng, 30);
  SmoOptions o;
  o.tol = 1e-8;
  const double c = 1.0;
  const SvmModel m = train_svm(in.k, in.labels, c, o);
  const auto pred = predict(m, in.k);
  for (Eigen::Index i = 0; i < 30; ++i) {
    const double a = m.alpha()(i);
    if (a > 1e-8 && a < c - 1e-8) {
      const double y = in.labels[i] ? 1.0 : -1.0;
      EXPECT_LT(std::abs(pred.decision(i) - y), 1e-6);
    }
  }
  EXPECT_LE(m.max_kkt_violation, 1e-8);
}

TEST(Smo, DeterministicForSeed) {
  std::mt19937_64 rng(6);
  const Instance in = random_instance(rng, 40);
  SmoOptions o;
  o.seed = 9;
  const SvmModel a = train_svm(in.k, in.labels, 10.0, o), b = train_svm(in.k, in.labels, 10.0, o);
  EXPECT_EQ(a.dual_coefs, b.dual_coefs);
  EXPECT_EQ(a.bias, b.bias);
  EXPECT_EQ(a.train_ref, fingerprint(in.k, in.labels));
}

TEST(Smo, IterationBudgetReportsNotConverged) {
  std::mt19937_64 rng(2);
  const Instance in = random_instance(rng, 60);
  SmoOptions o;
  o.tol = 1e-14;
  o.max_passes = 1;
  EXPECT_EQ(train_svm(in.k, in.labels, 100.0, o).status, SolverStatus::NotConverged);
}

TEST(Smo, InputValidation) {
  const Eigen::MatrixXd k = Eigen::MatrixXd::Identity(3, 3);
  EXPECT_THROW(train_svm(k, {0, 0, 0}, 1.0), DomainError);
  EXPECT_THROW(train_svm(k, {0, 1, 2}, 1.0), DomainError);
  EXPECT_THROW(train_svm(k, {0, 1}, 1.0), DomainError);
  EXPECT_THROW(train_svm(k, {0, 1, 1}, -1.0), DomainError);
  Eigen::MatrixXd asym = k;
  asym(0, 1) = 0.5;
  EXPECT_THROW(train_svm(asym, {0, 1, 1}, 1.0), DomainError);
}

TEST(Smo, ShiftsSlightlyIndefiniteGram) {
  Eigen::MatrixXd k = Eigen::MatrixXd::Identity(4, 4);
  k(0, 1) = k(1, 0) = 1.0 + 1e-9;  // min eigenvalue about -1e-9
  SmoOptions o;
  o.shift_indefinite = true;
  const SvmModel m = train_svm(k, {0, 1, 0, 1}, 1.0, o);
  EXPECT_GT(m.diagonal_shift, 0.0);
  EXPECT_LT(m.diagonal_shift, 1e-8);
}

TEST(Smo, ModelJsonCarriesSchemaVersion) {
  const SvmModel m = train_svm(Eigen::MatrixXd::Identity(2, 2), {0, 1}, 1.0);
  const auto j = nlohmann::json::parse(to_json(m));
  EXPECT_EQ(j.at("schema_version"), 1);
  EXPECT_EQ(nlohmann::json::parse(to_json(evaluate({0, 1}, {0, 1}, SplitTag::Test))).at("f1"), 1.0);
}

TEST(Grid, DefaultAxes) {
  const GridAxes g = default_grid(KernelFamily::KerrPhaseNeg);
  EXPECT_EQ(g.specs.size(), 50u);
  EXPECT_EQ(g.c_reg, (std::vector<double>{0.1, 1.0, 10.0, 100.0}));
  std::set<double> scaled;
  for (const auto& s : g.specs) scaled.insert(std::round(1e12 * std::sqrt(std::abs(*s.params.lambda) / 2.0) * *s.params.c) / 1e12);
  EXPECT_EQ(scaled, (std::set<double>{0.1, 0.25, 0.5, 1.0, 1.5}));
  EXPECT_EQ(default_grid(KernelFamily::KerrAmpPos).specs.size(), 50u);
  EXPECT_EQ(default_scaling(KernelFamily::RBF), ScalingMode::ZScore);
  EXPECT_EQ(default_scaling(KernelFamily::KerrAmpNeg), ScalingMode::AmplitudeBox);
  EXPECT_EQ(default_scaling(KernelFamily::KerrPhasePos), ScalingMode::PhasePeriodic);
}

TEST(Grid, SingleCellEqualsDirectFit) {
  const Dataset d = table_dataset("moons-v1", 7);
  const SplitPlan plan = split(d, SplitOptions{});
  const KernelSpec spec = kerr_phase_spec(0.5, -2.0, 1.5);
  const PreparedData data = prepare(d, plan, spec.family);
  GridAxes g{{spec}, {10.0}};
  const GridSearchResult r = grid_search(data, g, GridSearchOptions{});
  const FitResult f = fit_and_evaluate(data, spec, 10.0);
  EXPECT_EQ(r.test.confusion, f.test.confusion);
  EXPECT_EQ(r.train.confusion, f.train.confusion);
  EXPECT_EQ(r.best_spec, spec);
  EXPECT_EQ(r.trace.size(), 1u);
}

TEST(Grid, TraceCoversGridAndReachesMoonsScore) {
  const Dataset d = table_dataset("moons-v1", 7);
  const SplitPlan plan = split(d, SplitOptions{});
  const GridAxes g = default_grid(KernelFamily::KerrPhaseNeg);
  const GridSearchResult r = grid_search(d, plan, g, GridSearchOptions{});
  EXPECT_EQ(r.trace.size() + r.skipped.size(), g.specs.size() * g.c_reg.size());
  EXPECT_GT(r.test.f1, 0.88);
  for (const auto& t : r.trace) EXPECT_LE(t.test.f1, r.test.f1);
}

TEST(Grid, CrossValidationScenario) {
  const Dataset d = table_dataset("circles-v1", 7);
  SplitOptions so;
  so.k_folds = 3;
  so.seed = 7;
  const SplitPlan plan = split(d, so);
  GridAxes g = default_grid(KernelFamily::RBF);
  g.c_reg = {1.0};
  GridSearchOptions o;
  o.scenario = Scenario::CrossValDriven;
  const GridSearchResult r = grid_search(d, plan, g, o);
  ASSERT_TRUE(r.best_cv_f1.has_value());
  ASSERT_TRUE(r.cv.has_value());
  EXPECT_EQ(r.cv->confusion.total(), 300u);
  for (const auto& t : r.trace) EXPECT_LE(*t.cv_f1, *r.best_cv_f1);
  SplitPlan no_folds = split(d, SplitOptions{});
  EXPECT_THROW(grid_search(d, no_folds, g, o), DomainError);
}

TEST(Grid, ZeroNoiseMatchesNoiselessRun) {
  const Dataset d = table_dataset("moons-v1", 7);
  const SplitPlan plan = split(d, SplitOptions{});
  const KernelSpec spec = kerr_phase_spec(0.5, 2.0, 1.0);
  const PreparedData clean = prepare(d, plan, spec.family);
  const PreparedData zero = prepare(d, plan, spec.family, add_amplitude_noise(0.0, NoiseTarget::EncodingAmplitude, 3));
  EXPECT_EQ(full_gram(clean, spec), full_gram(zero, spec));
  const NoisePlan noisy = add_amplitude_noise(0.1, NoiseTarget::EncodingAmplitude, 3);
  EXPECT_EQ(full_gram(prepare(d, plan, spec.family, noisy), spec), full_gram(prepare(d, plan, spec.family, noisy), spec));
  EXPECT_NE(full_gram(prepare(d, plan, spec.family, noisy), spec), full_gram(clean, spec));
}

TEST(Grid, WorkerCountDoesNotChangeResult) {
  const Dataset d = table_dataset("disks-v1", 7);
  const SplitPlan plan = split(d, SplitOptions{});
  GridSearchOptions one, four;
  four.workers = 4;
  const auto a = grid_search(d, plan, default_grid(KernelFamily::ESS), one);
  const auto b = grid_search(d, plan, default_grid(KernelFamily::ESS), four);
  EXPECT_EQ(to_json(a), to_json(b));
  EXPECT_EQ(trace_csv(a), trace_csv(b));
}

TEST(Grid, PreparedScalingFitsTrainingRowsOnly) {
  const Dataset d = table_dataset("moons-v1", 7);
  const SplitPlan plan = split(d, SplitOptions{});
  const PreparedData p = prepare(d, plan, KernelFamily::KerrPhasePos);
  double lo = 1e9, hi = -1e9;
  for (auto i : plan.train_idx) lo = std::min(lo, p.features(i, 0)), hi = std::max(hi, p.features(i, 0));
  EXPECT_NEAR(lo, 0.0, 1e-14);
  EXPECT_NEAR(hi, std::numbers::pi, 1e-14);
}

}  // namespace
}  // namespace kerrkit
