#include <cstdio>
#include <string>
#include <vector>

#include "commands.hpp"
#include "kerrkit/error.hpp"

namespace {

using namespace kerrkit;
using namespace kerrkit::cli;

// Explicitly set options as --name=value, positionals bare, in declaration
// order. Values read from a config file count as set.
void append_args(const CLI::App& app, std::vector<std::string>& out) {
  for (const CLI::Option* opt : app.get_options()) {
    const std::string name = opt->get_name(false, true);
    if (opt->count() == 0 || name == "--help" || name == "--config" || name == "--replay") continue;
    for (const auto& v : opt->results()) {
      if (opt->get_positional() && opt->get_lnames().empty()) out.push_back(v);
      else out.push_back("--" + opt->get_lnames().front() + "=" + v);
    }
  }
}

// Effective value of every option: given, from the config file, or default.
void effective_options(const CLI::App& app, const std::string& prefix, nlohmann::json& out) {
  for (const CLI::Option* opt : app.get_options()) {
    if (opt->get_lnames().empty() && !opt->get_positional()) continue;
    const std::string name = opt->get_lnames().empty() ? opt->get_name() : opt->get_lnames().front();
    if (name == "help" || name == "config" || name == "replay" || name == "version") continue;
    if (opt->count() > 0) {
      const auto& r = opt->results();
      out[prefix + name] = r.size() == 1 ? nlohmann::json(r.front()) : nlohmann::json(r);
    } else {
      out[prefix + name] = opt->get_default_str();
    }
  }
}

std::vector<std::string> replay_args(const std::string& path, const std::string& out_override) {
  const auto manifest = nlohmann::json::parse(read_text(resolve_input(path)));
  std::vector<std::string> args = manifest.at("args").get<std::vector<std::string>>();
  if (!out_override.empty()) {
    for (auto& a : args) {
      if (a.rfind("--out=", 0) == 0) a = "--out=" + out_override;
    }
  }
  return args;
}

int run(int argc, char** argv) {
  CLI::App app{"Kerr coherent-state kernels, verification battery and benchmarks", "kerrkit"};
  app.require_subcommand(1);
  app.fallthrough();
  GlobalOptions g;
  std::string replay;
  app.add_option("--seed", g.seed, "Seed for data generation, splits and solver choices")->capture_default_str();
  app.add_option("--workers", g.workers, "Worker threads (positive integer or 'auto')")->capture_default_str();
  app.add_option("--out", g.out, "Output directory")->capture_default_str();
  app.add_option("--format", g.format, "Table output format")
      ->capture_default_str()
      ->check(CLI::IsMember({"csv", "json"}));
  app.set_config("--config", "", "TOML or INI file with option values (command-line flags take precedence)");
  app.add_option("--replay", replay, "Rerun the command recorded in a manifest");
  app.set_version_flag("--version", KERRKIT_VERSION);

  std::vector<Command> commands;
  register_gen_data(app, commands);
  register_gram(app, commands);
  register_train(app, commands);
  register_grid_search(app, commands);
  register_verify(app, commands);
  register_lattice(app, commands);
  register_bench(app, commands);

  std::vector<std::string> raw(argv + 1, argv + argc);
  // --replay takes the place of a subcommand, so look for it before parsing.
  for (std::size_t i = 0; i < raw.size(); ++i) {
    std::string path;
    if (raw[i] == "--replay" && i + 1 < raw.size()) path = raw[i + 1];
    else if (raw[i].rfind("--replay=", 0) == 0) path = raw[i].substr(9);
    if (path.empty()) continue;
    std::string out_override;
    for (std::size_t k = 0; k + 1 < raw.size(); ++k) {
      if (raw[k] == "--out") out_override = raw[k + 1];
    }
    for (const auto& r : raw) {
      if (r.rfind("--out=", 0) == 0) out_override = r.substr(6);
    }
    try {
      raw = replay_args(path, out_override);
    } catch (const DataUnavailable& e) {
      std::fprintf(stderr, "error: %s\n", e.what());
      return kMissingData;
    } catch (const std::exception& e) {
      std::fprintf(stderr, "error: cannot replay %s: %s\n", path.c_str(), e.what());
      return kUsage;
    }
    break;
  }

  try {
    std::vector<std::string> reversed(raw.rbegin(), raw.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  const Command* chosen = nullptr;
  for (const auto& c : commands) {
    if (c.app->parsed()) chosen = &c;
  }
  if (chosen == nullptr) return kUsage;

  std::vector<std::string> canonical;
  append_args(app, canonical);
  canonical.push_back(chosen->app->get_name());
  append_args(*chosen->app, canonical);

  std::unique_ptr<RunContext> ctx;
  try {
    ctx = std::make_unique<RunContext>(g, chosen->app->get_name(), canonical);
    nlohmann::json effective = nlohmann::json::object();
    effective_options(app, "", effective);
    effective_options(*chosen->app, chosen->app->get_name() + ".", effective);
    ctx->note("effective_options", effective);
    chosen->run(*ctx);
    ctx->write_manifest();
    return kOk;
  } catch (const VerificationFailure& e) {
    if (ctx) ctx->write_manifest();
    std::fprintf(stderr, "verification failed: %s\n", e.what());
    return kVerifyFailed;
  } catch (const DataUnavailable& e) {
    std::fprintf(stderr, "missing data: %s\n", e.what());
    return kMissingData;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kUsage;
  }
}

}  // namespace

int main(int argc, char** argv) { return run(argc, argv); }
