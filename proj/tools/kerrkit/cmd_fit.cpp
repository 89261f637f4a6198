// train and grid-search.
#include <charconv>
#include <memory>
#include <sstream>

#include "commands.hpp"
#include "kerrkit/error.hpp"
#include "kerrkit/gram_cache.hpp"
#include "kerrkit/grid_search.hpp"
#include "reproduction.hpp"

namespace kerrkit::cli {

namespace {

using nlohmann::json;

NoisePlan noise_for(KernelFamily f, double level, const RunContext& ctx) {
  return verify::noise_plan_for(f, level, ctx.seed());
}

std::pair<int, int> parse_mesh(const std::string& s) {
  const auto x = s.find('x');
  int w = 0, h = 0;
  auto parse = [](std::string_view t, int& v) {
    const auto [end, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    return ec == std::errc() && end == t.data() + t.size();
  };
  if (x == std::string::npos || !parse(std::string_view(s).substr(0, x), w) ||
      !parse(std::string_view(s).substr(x + 1), h) || w < 2 || h < 2) {
    throw DomainError("--boundary-grid must look like WxH with W, H >= 2, got '" + s + "'");
  }
  return {w, h};
}

// Decision function of a fitted model on a W x H mesh spanning the data.
void write_boundary(const Dataset& d, const PreparedData& data, const SvmModel& model, const std::string& mesh,
                    RunContext& ctx) {
  if (d.dims() != 2) throw DomainError("--boundary-grid needs a 2-feature dataset");
  const auto [w, h] = parse_mesh(mesh);
  const Eigen::RowVectorXd lo = d.features.colwise().minCoeff();
  const Eigen::RowVectorXd hi = d.features.colwise().maxCoeff();
  Eigen::MatrixXd raw(static_cast<Eigen::Index>(w) * h, 2);
  for (int k = 0; k < h; ++k) {
    for (int i = 0; i < w; ++i) {
      raw(static_cast<Eigen::Index>(k) * w + i, 0) = lo(0) + (hi(0) - lo(0)) * i / (w - 1);
      raw(static_cast<Eigen::Index>(k) * w + i, 1) = lo(1) + (hi(1) - lo(1)) * k / (h - 1);
    }
  }
  const Eigen::MatrixXd scaled = apply_scaling(data.scaling, raw);
  const auto& tr = data.plan.train_idx;
  const Eigen::MatrixXd train_x = data.features(tr, Eigen::all);
  Eigen::MatrixXd train_off;
  if (data.offsets_ptr()) train_off = data.offsets(tr, Eigen::all);
  const Eigen::MatrixXd k = cross_gram(scaled, train_x, model.spec, ctx.workers(), nullptr,
                                       data.offsets_ptr() ? &train_off : nullptr);
  const Prediction p = predict(model, k);
  if (ctx.format() == Format::Csv) {
    std::ostringstream out;
    out << "x0,x1,decision,label\n";
    for (Eigen::Index r = 0; r < raw.rows(); ++r) {
      out << format_double(raw(r, 0)) << ',' << format_double(raw(r, 1)) << ',' << format_double(p.decision(r))
          << ',' << p.labels[static_cast<std::size_t>(r)] << '\n';
    }
    ctx.write_output("boundary.csv", out.str());
  } else {
    json j;
    j["schema_version"] = 1;
    j["width"] = w;
    j["height"] = h;
    j["x0"] = std::vector<double>(raw.col(0).data(), raw.col(0).data() + w);
    std::vector<double> x1;
    for (int k2 = 0; k2 < h; ++k2) x1.push_back(raw(static_cast<Eigen::Index>(k2) * w, 1));
    j["x1"] = x1;
    json rows = json::array();
    for (int k2 = 0; k2 < h; ++k2) {
      rows.push_back(std::vector<double>(p.decision.data() + static_cast<std::ptrdiff_t>(k2) * w,
                                         p.decision.data() + static_cast<std::ptrdiff_t>(k2 + 1) * w));
    }
    j["decision"] = rows;
    ctx.write_output("boundary.json", j.dump(2) + "\n");
  }
}

struct TrainArgs {
  std::string data;
  std::string spec;
  double c_reg = 1.0;
  std::string cache;
  double noise = 0.0;
  std::string boundary;
  double tol = 1e-3;
  int max_passes = 1000;
  bool shift_indefinite = false;
};

void run_train(const TrainArgs& a, RunContext& ctx) {
  const Dataset d = load_dataset(a.data, &ctx);
  const KernelSpec spec = load_spec(a.spec, &ctx);
  validate(spec);
  const PreparedData data = prepare(d, presplit_plan(d), spec.family, noise_for(spec.family, a.noise, ctx));
  Eigen::MatrixXd full;
  if (!a.cache.empty()) {
    const auto path = resolve_input(a.cache);
    ctx.record_input("gram_cache", path);
    full = read_gram_cache(path.string());
    if (full.rows() != static_cast<Eigen::Index>(d.size())) {
      throw DomainError("gram cache has n = " + std::to_string(full.rows()) + " but the dataset has " +
                        std::to_string(d.size()) + " rows");
    }
  } else {
    full = full_gram(data, spec, ctx.workers());
  }
  SmoOptions smo;
  smo.tol = a.tol;
  smo.max_passes = a.max_passes;
  smo.seed = ctx.seed();
  smo.shift_indefinite = a.shift_indefinite;
  const FitResult fit = fit_on_gram(data, full, spec, a.c_reg, smo);
  json j;
  j["schema_version"] = 1;
  j["spec"] = json::parse(to_json(spec));
  j["c_reg"] = a.c_reg;
  j["f1_test"] = fit.test.f1;
  j["f1_train"] = fit.train.f1;
  j["accuracy_test"] = fit.test.accuracy;
  j["accuracy_train"] = fit.train.accuracy;
  j["scores"] = {{"test", json::parse(to_json(fit.test))}, {"train", json::parse(to_json(fit.train))}};
  j["model"] = json::parse(to_json(fit.model));
  ctx.write_output("train.json", j.dump(2) + "\n");
  if (!a.boundary.empty()) write_boundary(d, data, fit.model, a.boundary, ctx);
}

struct GridArgs {
  std::string data;
  std::string family;
  std::string scenario = "test";
  int k_folds = 5;
  double noise = 0.0;
  std::vector<double> c_reg;
  std::string boundary;
};

void run_grid(const GridArgs& a, RunContext& ctx) {
  const Dataset d = load_dataset(a.data, &ctx);
  const KernelFamily family = parse_family(a.family);
  const Scenario scenario = parse_scenario(a.scenario);
  GridAxes grid = default_grid(family);
  if (!a.c_reg.empty()) grid.c_reg = a.c_reg;
  const SplitPlan plan =
      presplit_plan(d, scenario == Scenario::CrossValDriven ? a.k_folds : 0, true, ctx.seed());
  const PreparedData data = prepare(d, plan, family, noise_for(family, a.noise, ctx));
  GridSearchOptions opts;
  opts.scenario = scenario;
  opts.seed = ctx.seed();
  opts.workers = ctx.workers();
  const GridSearchResult r = grid_search(data, grid, opts);
  json j = json::parse(to_json(r));
  j["f1_test"] = r.test.f1;
  j["f1_train"] = r.train.f1;
  j["dataset"] = d.name;
  ctx.write_output("grid_search.json", j.dump(2) + "\n");
  if (ctx.format() == Format::Csv) ctx.write_output("trace.csv", trace_csv(r));
  else ctx.write_output("trace.json", j["trace"].dump(2) + "\n");
  if (!a.boundary.empty()) {
    SmoOptions smo;
    smo.seed = ctx.seed();
    const FitResult fit = fit_and_evaluate(data, r.best_spec, r.best_c_reg, smo, ctx.workers());
    write_boundary(d, data, fit.model, a.boundary, ctx);
  }
}

}  // namespace

void register_train(CLI::App& root, std::vector<Command>& out) {
  auto a = std::make_shared<TrainArgs>();
  auto* sub = root.add_subcommand("train", "Fit one SVM and evaluate it on the stored test split");
  sub->add_option("--data", a->data, "Dataset CSV (train-first, as written by gen-data)")->required();
  sub->add_option("--spec", a->spec, "Kernel spec JSON (inline or file)")->required();
  sub->add_option("--c-reg", a->c_reg, "Box constraint C")->capture_default_str()->check(CLI::PositiveNumber);
  sub->add_option("--cache", a->cache, "Precomputed Gram cache over all rows");
  sub->add_option("--noise", a->noise, "Amplitude noise level")->capture_default_str()->check(CLI::NonNegativeNumber);
  sub->add_option("--boundary-grid", a->boundary, "Evaluate the decision function on a WxH mesh");
  sub->add_option("--tol", a->tol, "SMO KKT tolerance")->capture_default_str()->check(CLI::PositiveNumber);
  sub->add_option("--max-passes", a->max_passes, "SMO iteration budget per sample")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  sub->add_flag("--shift-indefinite", a->shift_indefinite, "Shift a slightly indefinite Gram onto the PSD cone");
  out.push_back({sub, [a](RunContext& ctx) { run_train(*a, ctx); }});
}

void register_grid_search(CLI::App& root, std::vector<Command>& out) {
  auto a = std::make_shared<GridArgs>();
  auto* sub = root.add_subcommand("grid-search", "Hyperparameter search over the default grid of a kernel family");
  sub->add_option("--data", a->data, "Dataset CSV (train-first, as written by gen-data)")->required();
  sub->add_option("--family", a->family, "Kernel family, e.g. KerrPhaseNeg")->required();
  sub->add_option("--scenario", a->scenario, "test (maximize test F1) or cv (maximize mean fold F1)")
      ->capture_default_str()
      ->check(CLI::IsMember({"test", "cv"}));
  sub->add_option("--k-folds", a->k_folds, "Folds for the cv scenario")->capture_default_str()->check(CLI::Range(2, 100));
  sub->add_option("--noise", a->noise, "Amplitude noise level")->capture_default_str()->check(CLI::NonNegativeNumber);
  sub->add_option("--c-reg", a->c_reg, "Override the C axis (repeatable)")->check(CLI::PositiveNumber);
  sub->add_option("--boundary-grid", a->boundary, "Decision function of the best model on a WxH mesh");
  out.push_back({sub, [a](RunContext& ctx) { run_grid(*a, ctx); }});
}

}  // namespace kerrkit::cli
