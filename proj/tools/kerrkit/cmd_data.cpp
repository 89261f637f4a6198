// gen-data and gram.
#include <filesystem>
#include <memory>

#include "commands.hpp"
#include "kerrkit/error.hpp"
#include "kerrkit/gram_cache.hpp"
#include "kerrkit/grid_search.hpp"
#include "reproduction.hpp"

namespace kerrkit::cli {

namespace {

struct GenDataArgs {
  std::string kind;
  std::string version = "v1";
  std::string preset = "double";
  std::string name;
  std::string input = "breastmnist.npz";
  std::string partition = "trainval";
};

void run_gen_data(const GenDataArgs& a, RunContext& ctx) {
  Dataset d;
  if (a.kind == "moons" || a.kind == "circles" || a.kind == "hypercube") {
    if (a.version != "v1" && a.version != "v2") throw DomainError("--version must be v1 or v2");
    d = table_dataset(a.kind + "-" + a.version, ctx.seed());
  } else if (a.kind == "disks") {
    d = make_disks_preset(parse_disks_preset(a.preset), ctx.seed());
  } else if (a.kind == "breastmnist") {
    BreastPartition part;
    if (a.partition == "trainval") part = BreastPartition::TrainVal;
    else if (a.partition == "traintest") part = BreastPartition::TrainTest;
    else throw DomainError("--partition must be trainval or traintest");
    const auto path = resolve_input(a.input);
    ctx.record_input("archive", path);
    d = load_breastmnist(path.string(), part);
  } else {
    throw DomainError("unknown dataset kind '" + a.kind + "'");
  }
  // Generated sets are stored train-first so downstream commands share the split.
  if (a.kind != "breastmnist") {
    SplitOptions so;
    so.seed = ctx.seed();
    d = train_first(d, split(d, so));
  }
  const std::string base = a.name.empty() ? d.name : a.name;
  const auto csv = ctx.out_dir() / (base + ".csv");
  write_dataset(d, csv.string());
  ctx.record_output(csv);
  ctx.record_output(csv.string() + ".json");
  ctx.note("dataset", {{"name", d.name}, {"rows", d.size()}, {"features", d.dims()}, {"n_train", d.n_train}});
}

struct GramArgs {
  std::string data;
  std::string spec;
  std::string name = "gram";
  bool audit = false;
  double noise = 0.0;
};

void run_gram(const GramArgs& a, RunContext& ctx) {
  const Dataset d = load_dataset(a.data, &ctx);
  const KernelSpec spec = load_spec(a.spec, &ctx);
  validate(spec);
  const PreparedData data =
      prepare(d, presplit_plan(d), spec.family, verify::noise_plan_for(spec.family, a.noise, ctx.seed()));
  GramOptions o;
  o.workers = ctx.workers();
  o.audit_psd = a.audit;
  o.offsets = data.offsets_ptr();
  const GramMatrix g = gram(data.features, spec, o);
  const auto path = ctx.out_dir() / (a.name + ".kgrm");
  write_gram_cache(path.string(), g.values);
  ctx.record_output(path);
  ctx.note("spec", nlohmann::json::parse(to_json(spec)));
  ctx.note("n", g.size());
  if (!a.audit) return;
  const double n = static_cast<double>(g.size());
  const double threshold = -1e-8 * n;
  const bool pass = g.min_eigenvalue.has_value() && *g.min_eigenvalue >= threshold;
  nlohmann::json report;
  report["schema_version"] = 1;
  report["check"] = "psd_audit";
  report["n"] = g.size();
  report["min_eigenvalue"] = g.min_eigenvalue.value_or(0.0);
  report["tolerance"] = threshold;
  report["pass"] = pass;
  ctx.write_output(a.name + ".audit.json", report.dump(2) + "\n");
  if (!pass) throw VerificationFailure("PSD audit failed: min eigenvalue below " + format_double(threshold));
}

}  // namespace

void register_gen_data(CLI::App& root, std::vector<Command>& out) {
  auto args = std::make_shared<GenDataArgs>();
  auto* sub = root.add_subcommand("gen-data", "Generate a dataset as CSV plus JSON sidecar");
  sub->add_option("kind", args->kind, "moons, circles, hypercube, disks or breastmnist")
      ->required()
      ->check(CLI::IsMember({"moons", "circles", "hypercube", "disks", "breastmnist"}));
  sub->add_option("--version", args->version, "Table preset version (v1, v2)")
      ->capture_default_str()
      ->check(CLI::IsMember({"v1", "v2"}));
  sub->add_option("--preset", args->preset, "Disks preset: double, double-v2, triple, quadruple")
      ->capture_default_str()
      ->check(CLI::IsMember({"double", "double-v2", "double_v2", "triple", "quadruple"}));
  sub->add_option("--name", args->name, "Output basename (default: dataset name)");
  sub->add_option("--input", args->input, "BreastMNIST archive (relative paths also searched in $KERRKIT_DATA_DIR)")
      ->capture_default_str();
  sub->add_option("--partition", args->partition, "BreastMNIST partition: trainval or traintest")
      ->capture_default_str()
      ->check(CLI::IsMember({"trainval", "traintest"}));
  out.push_back({sub, [args](RunContext& ctx) { run_gen_data(*args, ctx); }});
}

void register_gram(CLI::App& root, std::vector<Command>& out) {
  auto args = std::make_shared<GramArgs>();
  auto* sub = root.add_subcommand("gram", "Compute a Gram matrix cache for a dataset and kernel spec");
  sub->add_option("--data", args->data, "Dataset CSV")->required();
  sub->add_option("--spec", args->spec, "Kernel spec JSON (inline or file)")->required();
  sub->add_option("--name", args->name, "Output basename")->capture_default_str();
  sub->add_flag("--audit", args->audit, "Check min eigenvalue >= -1e-8 n");
  sub->add_option("--noise", args->noise, "Encoding noise level")->capture_default_str()->check(CLI::NonNegativeNumber);
  out.push_back({sub, [args](RunContext& ctx) { run_gram(*args, ctx); }});
}

}  // namespace kerrkit::cli
