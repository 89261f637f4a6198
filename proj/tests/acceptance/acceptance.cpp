// Acceptance criteria, one pass/fail line each. `--criterion N` runs one.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <map>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "battery.hpp"
#include "kerrkit/datasets.hpp"
#include "kerrkit/error.hpp"
#include "kerrkit/grid_search.hpp"
#include "reproduction.hpp"

namespace {

using namespace kerrkit;
using verify::CheckResult;

constexpr std::uint64_t kSeed = 7;

enum class Status { Pass, Fail, Skip };

struct Outcome {
  Status status = Status::Fail;
  std::string detail;
};

struct Context {
  int workers = 1;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

// Per check name: count, mandatory failures, worst residual.
struct CheckTally {
  int count = 0;
  int failed = 0;
  int advisory = 0;
  double worst = 0.0;
};

std::map<std::string, CheckTally> tally(const std::vector<CheckResult>& results) {
  std::map<std::string, CheckTally> out;
  for (const auto& r : results) {
    auto& t = out[r.check];
    ++t.count;
    if (!r.pass) ++(r.advisory ? t.advisory : t.failed);
    if (!r.lower_bound && !r.advisory) t.worst = std::max(t.worst, r.residual);
  }
  return out;
}

std::string describe(const std::map<std::string, CheckTally>& t) {
  std::string s;
  for (const auto& [name, v] : t) {
    if (!s.empty()) s += "; ";
    s += name + " " + std::to_string(v.count - v.failed - v.advisory) + "/" + std::to_string(v.count);
    if (v.worst > 0.0) s += fmt(" worst %.2e", v.worst);
    if (v.advisory > 0) s += " (" + std::to_string(v.advisory) + " advisory)";
  }
  return s;
}

// Diagnostics for failing checks go to stderr so stdout stays one line per criterion.
void report_failures(const std::vector<CheckResult>& results) {
  int shown = 0;
  for (const auto& r : results) {
    if (r.pass || r.advisory) continue;
    if (shown++ == 20) {
      std::fprintf(stderr, "  ...\n");
      break;
    }
    std::fprintf(stderr, "  failed %s residual %.3e tolerance %.1e %s\n", r.check.c_str(), r.residual, r.tolerance,
                 r.params.dump().c_str());
  }
}

Outcome from_checks(const std::vector<CheckResult>& results, std::string extra = {}) {
  report_failures(results);
  Outcome o;
  o.status = verify::all_pass(results) ? Status::Pass : Status::Fail;
  o.detail = describe(tally(results));
  if (!extra.empty()) o.detail += "; " + extra;
  return o;
}

Outcome with_runtime(Outcome o, double seconds, double limit) {
  o.detail += fmt("; runtime %.1f s", seconds) + fmt(" (limit %.0f s)", limit);
  if (seconds >= limit) o.status = Status::Fail;
  return o;
}

// ---- numerical criteria ---------------------------------------------------

Outcome oracle_equivalence(const Context& ctx) {
  const auto t0 = Clock::now();
  verify::FockParts parts;
  parts.decomposition = false;
  const auto r = verify::fock_checks(verify::fock_grid(verify::Tier::Full), Zeta0Exponent::Proof, ctx.workers, parts);
  return with_runtime(from_checks(r), seconds_since(t0), 120.0);
}

Outcome gaussian_decomposition(const Context& ctx) {
  verify::FockParts parts;
  parts.oracle = false;
  const auto r = verify::fock_checks(verify::fock_grid(verify::Tier::Full), Zeta0Exponent::Proof, ctx.workers, parts);
  return from_checks(r);
}

Outcome geometry(const Context&) { return from_checks(verify::geometry_checks(verify::Tier::Full, true)); }

Outcome resolution_and_reproducing(const Context&) {
  const auto t0 = Clock::now();
  const auto r = verify::quadrature_checks(verify::Tier::Full);
  return with_runtime(from_checks(r), seconds_since(t0), 600.0);
}

Outcome psd(const Context& ctx) {
  return from_checks(verify::psd_checks(verify::Tier::Full, kSeed, ctx.workers, true));
}

Outcome svm_solver(const Context&) { return from_checks(verify::svm_checks(100, kSeed)); }

Outcome lattice(const Context&) {
  const auto t0 = Clock::now();
  const auto r = verify::lattice_checks();
  return with_runtime(from_checks(r), seconds_since(t0), 60.0);
}

// ---- benchmark reproduction -----------------------------------------------

const std::vector<std::pair<KernelFamily, std::string>> kKerrFamilies = {
    {KernelFamily::KerrPhaseNeg, "KCS-"},
    {KernelFamily::KerrPhasePos, "KCS+"},
    {KernelFamily::KerrAmpNeg, "AmpKCS-"},
    {KernelFamily::KerrAmpPos, "AmpKCS+"},
};

GridSearchResult cell(const Dataset& d, KernelFamily f, const Context& ctx, double noise = 0.0,
                      std::uint64_t seed = kSeed) {
  verify::TableCellOptions o;
  o.noise = noise;
  o.seed = seed;
  o.workers = ctx.workers;
  return verify::run_table_cell(d, f, o);
}

double pct(double v) { return 100.0 * v; }

Outcome table2_reproduction(const Context& ctx) {
  const auto t0 = Clock::now();
  const std::vector<std::pair<std::string, double>> targets = {
      {"moons-v1", 93.88}, {"circles-v2", 98.6}, {"hypercube-v1", 93.07}};
  bool ok = true;
  std::string detail;
  for (const auto& [name, published] : targets) {
    const Dataset d = table_dataset(name, kSeed);
    const double rbf = pct(cell(d, KernelFamily::RBF, ctx).test.f1);
    const bool directional = name != "circles-v2";
    detail += (detail.empty() ? "" : "; ") + name + fmt(" RBF %.2f", rbf);
    for (const auto& [f, label] : kKerrFamilies) {
      const double f1 = pct(cell(d, f, ctx).test.f1);
      const bool near = std::abs(f1 - published) <= 5.0;
      const bool direction = !directional || f1 >= rbf - 2.0;
      if (!near || !direction) ok = false;
      detail += " " + label + fmt(" %.2f", f1) + (near ? "" : "[off]") + (direction ? "" : "[<RBF-2]");
    }
    std::fprintf(stderr, "  %s done\n", name.c_str());
  }
  return with_runtime({ok ? Status::Pass : Status::Fail, detail}, seconds_since(t0), 1800.0);
}

Outcome table4_periodic(const Context& ctx) {
  bool ok = true;
  std::string detail;
  for (const std::string name : {"disks-v2", "triple", "quadruple"}) {
    const Dataset d = table_dataset(name, kSeed);
    for (const auto& [f, label] : {std::pair{KernelFamily::ESS, "ESS"}, std::pair{KernelFamily::QEC, "QEC"}}) {
      const double f1 = pct(cell(d, f, ctx).test.f1);
      const bool near = std::abs(f1 - 100.0) <= 2.0;
      ok = ok && near;
      detail += (detail.empty() ? "" : " ") + name + " " + label + fmt(" %.2f", f1) + (near ? "" : "[off]");
    }
  }
  // Squeezing against the periodic kernels on disks-v1, averaged over five
  // regenerations of the data so a single draw cannot decide the ordering.
  double sq = 0.0, ess = 0.0, qec = 0.0;
  constexpr int kDraws = 5;
  for (std::uint64_t seed = 1; seed <= kDraws; ++seed) {
    const Dataset d = table_dataset("disks-v1", seed);
    sq += pct(cell(d, KernelFamily::SqueezedPhase, ctx, 0.0, seed).test.f1) / kDraws;
    ess += pct(cell(d, KernelFamily::ESS, ctx, 0.0, seed).test.f1) / kDraws;
    qec += pct(cell(d, KernelFamily::QEC, ctx, 0.0, seed).test.f1) / kDraws;
  }
  const bool below = sq < ess && sq < qec;
  ok = ok && below;
  detail += fmt("; disks-v1 mean Squeezing %.2f", sq) + fmt(" ESS %.2f", ess) + fmt(" QEC %.2f", qec) +
            (below ? "" : "[not below]");
  return {ok ? Status::Pass : Status::Fail, detail};
}

Outcome table6_noise(const Context& ctx) {
  bool ok = true;
  std::string detail;
  for (const std::string name : {"moons-v1", "circles-v1"}) {
    const Dataset d = table_dataset(name, kSeed);
    auto drop = [&](KernelFamily f) { return pct(cell(d, f, ctx).test.f1 - cell(d, f, ctx, 0.1).test.f1); };
    const double rbf = drop(KernelFamily::RBF);
    detail += (detail.empty() ? "" : "; ") + name + fmt(" drop RBF %.2f", rbf);
    for (const auto& [f, label] : kKerrFamilies) {
      const double k = drop(f);
      const bool better = k <= rbf;
      ok = ok && better;
      detail += " " + label + fmt(" %.2f", k) + (better ? "" : "[>RBF]");
    }
  }
  return {ok ? Status::Pass : Status::Fail, detail};
}

std::filesystem::path breast_archive() {
  const char* dir = std::getenv("KERRKIT_DATA_DIR");
  if (dir == nullptr || *dir == '\0') return {};
  const auto p = std::filesystem::path(dir) / "breastmnist.npz";
  return std::filesystem::exists(p) ? p : std::filesystem::path{};
}

Outcome breast_mnist(const Context& ctx) {
  const auto path = breast_archive();
  if (path.empty()) return {Status::Skip, "breastmnist.npz not found under $KERRKIT_DATA_DIR"};
  const Dataset d = load_breastmnist(path.string(), BreastPartition::TrainVal);
  double best = 0.0;
  std::string detail;
  for (const auto& [f, label] : kKerrFamilies) {
    const double acc = pct(cell(d, f, ctx).test.accuracy);
    best = std::max(best, acc);
    detail += (detail.empty() ? "" : " ") + label + fmt(" %.2f", acc);
  }
  detail += fmt("; best %.2f (need >= 83)", best);
  return {best >= 83.0 ? Status::Pass : Status::Fail, detail};
}

struct Criterion {
  int id;
  const char* title;
  std::function<Outcome(const Context&)> run;
};

const std::vector<Criterion>& criteria() {
  static const std::vector<Criterion> all = {
      {1, "state and kernel oracle equivalence", oracle_equivalence},
      {2, "Gaussian decomposition with negative control", gaussian_decomposition},
      {3, "curvature, embedding and pullback metric", geometry},
      {4, "resolution of identity and reproducing kernel", resolution_and_reproducing},
      {5, "Gram PSD audit", psd},
      {6, "SMO against reference QP", svm_solver},
      {7, "classical benchmark F1 reproduction", table2_reproduction},
      {8, "periodic datasets", table4_periodic},
      {9, "noise robustness", table6_noise},
      {10, "Breast MNIST accuracy", breast_mnist},
      {11, "Glauber-Fock lattice", lattice},
  };
  return all;
}

const char* status_name(Status s) {
  switch (s) {
    case Status::Pass: return "PASS";
    case Status::Fail: return "FAIL";
    case Status::Skip: return "SKIP";
  }
  return "?";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance criteria", "kerrkit_acceptance"};
  std::vector<int> selected;
  Context ctx;
  const char* env_workers = std::getenv("KERRKIT_WORKERS");
  ctx.workers = env_workers ? std::max(1, std::atoi(env_workers))
                            : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  app.add_option("--criterion", selected, "Criterion number (repeatable); default all")->check(CLI::Range(1, 11));
  app.add_option("--workers", ctx.workers, "Worker threads")->check(CLI::PositiveNumber);
  CLI11_PARSE(app, argc, argv);

  bool failed = false;
  for (const auto& c : criteria()) {
    if (!selected.empty() && std::find(selected.begin(), selected.end(), c.id) == selected.end()) continue;
    Outcome o;
    try {
      o = c.run(ctx);
    } catch (const std::exception& e) {
      o = {Status::Fail, std::string("error: ") + e.what()};
    }
    failed = failed || o.status == Status::Fail;
    std::printf("criterion %2d %s  %s: %s\n", c.id, status_name(o.status), c.title, o.detail.c_str());
    std::fflush(stdout);
  }
  return failed ? 1 : 0;
}
