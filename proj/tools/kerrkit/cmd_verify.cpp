// verify: the invariant battery as a JSON report.
#include <chrono>
#include <cstdio>
#include <memory>

#include "battery.hpp"
#include "commands.hpp"

namespace kerrkit::cli {

namespace {

struct VerifyArgs {
  std::string tier = "quick";
  std::string zeta0 = "proof";
  std::vector<std::string> groups;
  std::string report = "verify_report.json";
  bool quiet = false;
};

void run_verify(const VerifyArgs& a, RunContext& ctx) {
  verify::BatteryOptions o;
  o.tier = verify::parse_tier(a.tier);
  o.zeta0 = a.zeta0 == "lemma" ? Zeta0Exponent::LemmaStatement : Zeta0Exponent::Proof;
  o.workers = ctx.workers();
  o.seed = ctx.seed();
  o.groups = a.groups;
  const auto t0 = std::chrono::steady_clock::now();
  const auto results = verify::run_battery(o, [&](const verify::CheckResult& r) {
    if (a.quiet) return;
    const char* tag = r.pass ? "pass" : (r.advisory ? "note" : "FAIL");
    std::string where;
    for (const char* key : {"lambda", "j", "dataset", "family", "realify", "preset"}) {
      if (r.params.contains(key)) where += std::string(key) + "=" + r.params[key].dump() + " ";
    }
    std::printf("%-4s %-24s residual %-11.3e %s %-9.1e %s\n", tag, r.check.c_str(), r.residual,
                r.lower_bound ? ">=" : "<=", r.tolerance, where.c_str());
  });
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  nlohmann::json report;
  report["schema_version"] = 1;
  report["tier"] = a.tier;
  report["zeta0"] = a.zeta0;
  nlohmann::json checks = nlohmann::json::array();
  std::size_t failed = 0, advisory_failed = 0;
  for (const auto& r : results) {
    checks.push_back(verify::to_json(r));
    if (!r.pass) ++(r.advisory ? advisory_failed : failed);
  }
  report["checks"] = checks;
  report["summary"] = {{"checks", results.size()}, {"failed", failed}, {"advisory_failed", advisory_failed}};
  report["pass"] = failed == 0;
  ctx.write_output(a.report, report.dump(2) + "\n");
  ctx.note("summary", report["summary"]);
  // Wall time goes to stdout only; the report stays byte-stable across reruns.
  std::printf("%zu checks, %zu failed, %zu advisory notes, %.1f s\n", results.size(), failed, advisory_failed,
              seconds);
  std::fflush(stdout);
  if (failed > 0) throw VerificationFailure(std::to_string(failed) + " verification check(s) failed");
}

}  // namespace

void register_verify(CLI::App& root, std::vector<Command>& out) {
  auto a = std::make_shared<VerifyArgs>();
  auto* sub = root.add_subcommand("verify", "Run the numerical invariant battery and write a JSON report");
  sub->add_option("--tier", a->tier, "quick or full")->capture_default_str()->check(CLI::IsMember({"quick", "full"}));
  sub->add_option("--zeta0", a->zeta0, "Exponent in the Gaussian decomposition: proof, or lemma (fault injection)")
      ->capture_default_str()
      ->check(CLI::IsMember({"proof", "lemma"}));
  sub->add_option("--group", a->groups, "Restrict to check groups: fock, geometry, quadrature, svm, psd, lattice")
      ->check(CLI::IsMember(verify::group_names()));
  sub->add_option("--report", a->report, "Report file name inside --out")->capture_default_str();
  sub->add_flag("--quiet", a->quiet, "Only print the summary line");
  out.push_back({sub, [a](RunContext& ctx) { run_verify(*a, ctx); }});
}

}  // namespace kerrkit::cli
