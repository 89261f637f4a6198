#include "run_context.hpp"

#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <thread>

#include "kerrkit/error.hpp"
#include "kerrkit/gram_cache.hpp"

namespace kerrkit::cli {

namespace fs = std::filesystem;

#ifndef KERRKIT_VERSION
#define KERRKIT_VERSION "unknown"
#endif

int parse_workers(const std::string& s) {
  if (s == "auto") {
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
  }
  int v = 0;
  const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || end != s.data() + s.size() || v < 1) {
    throw DomainError("--workers must be a positive integer or 'auto', got '" + s + "'");
  }
  return v;
}

Format parse_format(const std::string& s) {
  if (s == "csv") return Format::Csv;
  if (s == "json") return Format::Json;
  throw DomainError("--format must be csv or json, got '" + s + "'");
}

RunContext::RunContext(const GlobalOptions& g, std::string command, std::vector<std::string> args)
    : command_(std::move(command)),
      args_(std::move(args)),
      seed_(g.seed),
      workers_(parse_workers(g.workers)),
      workers_requested_(g.workers),
      format_(parse_format(g.format)),
      out_dir_(g.out) {
  fs::create_directories(out_dir_);
}

fs::path RunContext::write_output(const std::string& name, const std::string& content) {
  const fs::path path = out_dir_ / name;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << content;
  out.close();
  if (!out) throw Error("write failed for " + path.string());
  record_output(path);
  return path;
}

void RunContext::record_output(const fs::path& path) {
  outputs_.push_back({{"file", path.filename().string()}, {"sha256", file_sha256(path.string())}});
}

void RunContext::record_input(const std::string& role, const fs::path& path) {
  inputs_.push_back({{"role", role}, {"path", path.string()}, {"sha256", file_sha256(path.string())}});
}

fs::path RunContext::write_manifest() const {
  nlohmann::json m;
  m["schema_version"] = 1;
  m["tool"] = "kerrkit";
  m["library_version"] = KERRKIT_VERSION;
  m["command"] = command_;
  m["args"] = args_;
  m["seed"] = seed_;
  m["workers"] = workers_requested_;
  m["format"] = format_ == Format::Csv ? "csv" : "json";
  m["inputs"] = inputs_;
  m["outputs"] = outputs_;
  m["details"] = notes_;
  const fs::path path = out_dir_ / (command_ + ".manifest.json");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << m.dump(2) << '\n';
  return path;
}

fs::path resolve_input(const std::string& path) {
  fs::path p(path);
  if (fs::exists(p)) return p;
  if (p.is_relative()) {
    if (const char* root = std::getenv("KERRKIT_DATA_DIR"); root != nullptr && *root != '\0') {
      const fs::path q = fs::path(root) / p;
      if (fs::exists(q)) return q;
    }
  }
  throw DataUnavailable("input not found: " + path + " (also searched $KERRKIT_DATA_DIR)");
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read " + path.string());
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

KernelSpec load_spec(const std::string& spec_arg, RunContext* ctx) {
  const auto first = spec_arg.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && spec_arg[first] == '{') return kernel_spec_from_json(spec_arg);
  const fs::path p = resolve_input(spec_arg);
  if (ctx) ctx->record_input("spec", p);
  return kernel_spec_from_json(read_text(p));
}

Dataset load_dataset(const std::string& path, RunContext* ctx) {
  const fs::path p = resolve_input(path);
  if (ctx) ctx->record_input("data", p);
  return read_dataset(p.string());
}

// Shortest text that round-trips.
std::string format_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

}  // namespace kerrkit::cli
