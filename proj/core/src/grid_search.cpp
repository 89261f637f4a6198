#include "kerrkit/grid_search.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <sstream>
#include <tuple>

#include <json.hpp>

#include "json_support.hpp"
#include "kerrkit/error.hpp"
#include "parallel.hpp"
#include "svm_internal.hpp"

namespace kerrkit {

std::string to_string(Scenario s) { return s == Scenario::TestDriven ? "TestDriven" : "CrossValDriven"; }

Scenario parse_scenario(const std::string& s) {
  if (s == "test" || s == "TestDriven") return Scenario::TestDriven;
  if (s == "cv" || s == "CrossValDriven") return Scenario::CrossValDriven;
  throw ParseError("unknown scenario '" + s + "' (test, cv)");
}

ScalingMode default_scaling(KernelFamily f) {
  switch (f) {
    case KernelFamily::KerrPhasePos:
    case KernelFamily::KerrPhaseNeg:
    case KernelFamily::SqueezedPhase:
    case KernelFamily::ESS:
    case KernelFamily::QEC:
      return ScalingMode::PhasePeriodic;
    case KernelFamily::KerrAmpPos:
    case KernelFamily::KerrAmpNeg:
    case KernelFamily::SqueezedAmp:
      return ScalingMode::AmplitudeBox;
    case KernelFamily::RBF:
      return ScalingMode::ZScore;
  }
  return ScalingMode::None;
}

double default_scaling_span(KernelFamily f) {
  return default_scaling(f) == ScalingMode::PhasePeriodic ? std::numbers::pi : 1.0;
}

std::vector<int> PreparedData::labels_at(const std::vector<std::size_t>& idx) const {
  std::vector<int> out;
  out.reserve(idx.size());
  for (auto i : idx) out.push_back(labels[i]);
  return out;
}

PreparedData prepare(const Dataset& d, const SplitPlan& plan, KernelFamily family,
                     const NoisePlan& noise) {
  validate(d);
  PreparedData p;
  p.plan = plan;
  p.labels = d.labels;
  Eigen::MatrixXd raw = d.features;
  const auto all_rows = [&] {
    std::vector<std::size_t> v(d.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = i;
    return v;
  }();
  if (noise.active() && noise.target == NoiseTarget::RawFeatures) {
    raw += noise_offsets(noise, all_rows, raw.cols());
  }
  const Eigen::MatrixXd train_raw = raw(plan.train_idx, Eigen::all);
  p.scaling = fit_scaling(train_raw, default_scaling(family), default_scaling_span(family));
  p.features = apply_scaling(p.scaling, raw);
  if (noise.active() && noise.target == NoiseTarget::EncodingAmplitude) {
    p.offsets = noise_offsets(noise, all_rows, raw.cols());
  }
  return p;
}

Eigen::MatrixXd full_gram(const PreparedData& data, const KernelSpec& spec, int workers) {
  GramOptions o;
  o.workers = workers;
  o.offsets = data.offsets_ptr();
  return gram(data.features, spec, o).values;
}

namespace {

SvmModel train_on(const Eigen::MatrixXd& full, const std::vector<std::size_t>& idx,
                  const std::vector<int>& labels, const KernelSpec& spec, double c_reg,
                  const SmoOptions& smo) {
  const Eigen::MatrixXd k = full(idx, idx);
  SvmModel m = train_svm(k, labels, c_reg, smo);
  m.spec = spec;
  return m;
}

}  // namespace

FitResult fit_on_gram(const PreparedData& data, const Eigen::MatrixXd& full, const KernelSpec& spec,
                      double c_reg, const SmoOptions& smo) {
  const auto& tr = data.plan.train_idx;
  const auto& te = data.plan.test_idx;
  FitResult r;
  const auto y_train = data.labels_at(tr);
  r.model = train_on(full, tr, y_train, spec, c_reg, smo);
  const Prediction on_train = predict(r.model, full(tr, tr));
  r.train = evaluate(y_train, on_train.labels, SplitTag::Train);
  if (!te.empty()) {
    r.test_prediction = predict(r.model, full(te, tr));
    r.test = evaluate(data.labels_at(te), r.test_prediction.labels, SplitTag::Test);
  }
  return r;
}

FitResult fit_and_evaluate(const PreparedData& data, const KernelSpec& spec, double c_reg,
                           const SmoOptions& smo, int workers) {
  return fit_on_gram(data, full_gram(data, spec, workers), spec, c_reg, smo);
}

GridAxes default_grid(KernelFamily f) {
  GridAxes g;
  g.c_reg = {0.1, 1.0, 10.0, 100.0};
  const std::vector<double> scaled = {0.1, 0.25, 0.5, 1.0, 1.5};
  std::vector<double> js;
  for (int t = 1; t <= 10; ++t) js.push_back(0.5 * t);
  switch (f) {
    case KernelFamily::KerrPhasePos:
    case KernelFamily::KerrPhaseNeg: {
      const double lambda = f == KernelFamily::KerrPhasePos ? 2.0 : -2.0;
      for (double j : js)
        for (double sc : scaled) g.specs.push_back(kerr_phase_spec(sc, lambda, j));
      break;
    }
    case KernelFamily::KerrAmpPos:
    case KernelFamily::KerrAmpNeg: {
      const double sign = f == KernelFamily::KerrAmpPos ? 1.0 : -1.0;
      for (double j : js)
        for (double s : scaled) g.specs.push_back(kerr_amp_spec(sign * 2.0 * s * s, j));
      break;
    }
    case KernelFamily::SqueezedPhase:
      g.specs.push_back(squeezed_phase_spec(1.0));
      break;
    case KernelFamily::SqueezedAmp:
      g.specs.push_back(squeezed_amp_spec());
      break;
    case KernelFamily::RBF:
      for (double s : {0.05, 0.1, 0.2, 0.5, 1.0, 2.0, 5.0}) g.specs.push_back(rbf_spec(s));
      break;
    case KernelFamily::ESS:
      for (double l : {0.25, 0.5, 1.0, 2.0})
        for (double p : {0.5, 1.0, 2.0, 4.0, 8.0}) g.specs.push_back(ess_spec(l, p));
      break;
    case KernelFamily::QEC:
      for (double l : {0.5, 1.0, 2.0})
        for (double s : {0.25, 0.5, 1.0, 1.5})
          for (double j : {0.5, 1.0, 2.0, 3.0}) g.specs.push_back(qec_spec(l, -2.0 * s * s, j));
      break;
  }
  return g;
}

namespace {

// Lexicographic preference: higher objective, then smoother kernels.
auto tie_key(const KernelSpec& s, double c_reg) {
  const auto& p = s.params;
  return std::make_tuple(p.j ? p.j->value() : 0.0, p.lambda ? std::abs(*p.lambda) : 0.0, c_reg,
                         p.c.value_or(0.0), p.sigma.value_or(0.0), p.l.value_or(0.0),
                         p.p.value_or(0.0));
}

struct CellOutcome {
  bool skipped = false;
  std::string reason;
  std::vector<TraceEntry> entries;
  std::vector<Confusion> cv_pooled;
};

}  // namespace

GridSearchResult grid_search(const PreparedData& data, const GridAxes& grid,
                             const GridSearchOptions& options) {
  if (grid.specs.empty() || grid.c_reg.empty()) throw DomainError("grid search needs a non-empty grid");
  const bool cv = options.scenario == Scenario::CrossValDriven;
  if (cv && data.plan.cv_folds.empty()) throw DomainError("cross-validation scenario needs k-fold splits");
  const auto n_specs = static_cast<int>(grid.specs.size());
  const auto n_c = grid.c_reg.size();
  std::vector<CellOutcome> outcomes(static_cast<std::size_t>(n_specs));

  detail::parallel_for(n_specs, detail::resolve_workers(options.workers), [&](int s) {
    CellOutcome& out = outcomes[static_cast<std::size_t>(s)];
    const KernelSpec& spec = grid.specs[static_cast<std::size_t>(s)];
    Eigen::MatrixXd full;
    try {
      validate(spec);
      full = full_gram(data, spec, 1);
    } catch (const DomainError& e) {
      out.skipped = true;
      out.reason = e.what();
      return;
    }
    for (std::size_t k = 0; k < n_c; ++k) {
      const std::uint64_t cell = static_cast<std::uint64_t>(s) * n_c + k;
      SmoOptions smo = options.smo;
      smo.seed = derive_seed(options.seed, cell);
      const double c_reg = grid.c_reg[k];
      FitResult fit = fit_on_gram(data, full, spec, c_reg, smo);
      TraceEntry e;
      e.spec = spec;
      e.c_reg = c_reg;
      e.test = fit.test;
      e.train = fit.train;
      Confusion pooled;
      if (cv) {
        double sum = 0.0;
        for (const Fold& fold : data.plan.cv_folds) {
          const auto y_tr = data.labels_at(fold.train);
          const SvmModel m = train_on(full, fold.train, y_tr, spec, c_reg, smo);
          const Prediction pv = predict(m, full(fold.validate, fold.train));
          const Confusion conf = confusion_matrix(data.labels_at(fold.validate), pv.labels);
          sum += f1_score(conf);
          pooled.tp += conf.tp, pooled.fp += conf.fp, pooled.fn += conf.fn, pooled.tn += conf.tn;
        }
        e.cv_f1 = sum / static_cast<double>(data.plan.cv_folds.size());
      }
      out.entries.push_back(std::move(e));
      out.cv_pooled.push_back(pooled);
    }
  });

  GridSearchResult r;
  r.scenario = options.scenario;
  const TraceEntry* best = nullptr;
  Confusion best_pooled;
  for (const auto& out : outcomes) {
    if (out.skipped) continue;
    for (std::size_t k = 0; k < out.entries.size(); ++k) {
      const TraceEntry& e = out.entries[k];
      r.trace.push_back(e);
      const double obj = cv ? *e.cv_f1 : e.test.f1;
      bool better = best == nullptr;
      if (!better) {
        const double best_obj = cv ? *best->cv_f1 : best->test.f1;
        if (obj != best_obj) better = obj > best_obj;
        else better = tie_key(e.spec, e.c_reg) < tie_key(best->spec, best->c_reg);
      }
      if (better) {
        best = &e;
        best_pooled = out.cv_pooled[k];
      }
    }
  }
  for (std::size_t s = 0; s < outcomes.size(); ++s) {
    if (outcomes[s].skipped) r.skipped.push_back({grid.specs[s], outcomes[s].reason});
  }
  if (best == nullptr) throw DomainError("every grid cell was skipped");
  r.best_spec = best->spec;
  r.best_c_reg = best->c_reg;
  r.test = best->test;
  r.train = best->train;
  if (cv) {
    r.best_cv_f1 = best->cv_f1;
    EvalReport rep;
    rep.confusion = best_pooled;
    rep.f1 = f1_score(best_pooled);
    rep.accuracy = accuracy(best_pooled);
    rep.split_tag = SplitTag::CrossVal;
    r.cv = rep;
  }
  return r;
}

GridSearchResult grid_search(const Dataset& d, const SplitPlan& plan, const GridAxes& grid,
                             const GridSearchOptions& options, const NoisePlan& noise) {
  if (grid.specs.empty()) throw DomainError("grid search needs a non-empty grid");
  const PreparedData data = prepare(d, plan, grid.specs.front().family, noise);
  return grid_search(data, grid, options);
}

std::string to_json(const GridSearchResult& r) {
  using nlohmann::json;
  json j;
  j["schema_version"] = 1;
  j["scenario"] = to_string(r.scenario);
  j["best_spec"] = detail::spec_to_json(r.best_spec);
  j["best_c_reg"] = r.best_c_reg;
  j["best_cv_f1"] = r.best_cv_f1 ? json(*r.best_cv_f1) : json(nullptr);
  j["scores"] = {{"cv", r.cv ? detail::report_to_json(*r.cv) : json(nullptr)},
                 {"test", detail::report_to_json(r.test)},
                 {"train", detail::report_to_json(r.train)}};
  json trace = json::array();
  for (const auto& e : r.trace) {
    trace.push_back({{"spec", detail::spec_to_json(e.spec)},
                     {"c_reg", e.c_reg},
                     {"cv_f1", e.cv_f1 ? json(*e.cv_f1) : json(nullptr)},
                     {"test_f1", e.test.f1},
                     {"train_f1", e.train.f1},
                     {"test_accuracy", e.test.accuracy}});
  }
  j["trace"] = trace;
  json skipped = json::array();
  for (const auto& s : r.skipped) skipped.push_back({{"spec", detail::spec_to_json(s.spec)}, {"reason", s.reason}});
  j["skipped"] = skipped;
  return j.dump(2);
}

std::string trace_csv(const GridSearchResult& r) {
  std::ostringstream out;
  out << "family,c,lambda,j,scaled_c,sigma,l,p,c_reg,cv_f1,test_f1,train_f1\n";
  auto num = [](std::optional<double> v) {
    if (!v) return std::string();
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", *v);
    return std::string(buf);
  };
  for (const auto& e : r.trace) {
    const auto& p = e.spec.params;
    // sqrt(|lambda|/2) c, the combination the Kerr kernels depend on.
    std::optional<double> scaled;
    if (p.lambda) scaled = std::sqrt(std::abs(*p.lambda) / 2.0) * p.c.value_or(1.0);
    out << to_string(e.spec.family) << ',' << num(p.c) << ',' << num(p.lambda) << ','
        << num(p.j ? std::optional<double>(p.j->value()) : std::nullopt) << ',' << num(scaled) << ','
        << num(p.sigma) << ','
        << num(p.l) << ',' << num(p.p) << ',' << num(e.c_reg) << ',' << num(e.cv_f1) << ','
        << num(e.test.f1) << ',' << num(e.train.f1) << '\n';
  }
  return out.str();
}

}  // namespace kerrkit
