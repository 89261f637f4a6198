#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "kerrkit/datasets.hpp"
#include "kerrkit/kernels.hpp"

namespace kerrkit::cli {

enum ExitCode { kOk = 0, kUsage = 1, kVerifyFailed = 2, kMissingData = 3 };

enum class Format { Csv, Json };

// Raised by commands that finished writing their outputs but detected a
// failed check; maps to exit code 2.
class VerificationFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct GlobalOptions {
  std::uint64_t seed = 7;
  std::string workers = "1";
  std::string out = "kerrkit-out";
  std::string format = "csv";
};

// Per-run state: resolved globals plus the manifest being accumulated.
class RunContext {
 public:
  RunContext(const GlobalOptions& g, std::string command, std::vector<std::string> args);

  std::uint64_t seed() const { return seed_; }
  int workers() const { return workers_; }
  Format format() const { return format_; }
  const std::filesystem::path& out_dir() const { return out_dir_; }

  // Writes `content` to out_dir/name and records its hash.
  std::filesystem::path write_output(const std::string& name, const std::string& content);
  // Records a file some library routine already wrote.
  void record_output(const std::filesystem::path& path);
  void record_input(const std::string& role, const std::filesystem::path& path);
  void note(const std::string& key, nlohmann::json value) { notes_[key] = std::move(value); }

  // Writes out_dir/<command>.manifest.json.
  std::filesystem::path write_manifest() const;

 private:
  std::string command_;
  std::vector<std::string> args_;
  std::uint64_t seed_;
  int workers_;
  std::string workers_requested_;
  Format format_;
  std::filesystem::path out_dir_;
  nlohmann::json inputs_ = nlohmann::json::array();
  nlohmann::json outputs_ = nlohmann::json::array();
  nlohmann::json notes_ = nlohmann::json::object();
};

int parse_workers(const std::string& s);
Format parse_format(const std::string& s);

// Existing path as given, else relative to $KERRKIT_DATA_DIR.
std::filesystem::path resolve_input(const std::string& path);

// Inline JSON (starting with '{') or a path to a JSON file.
KernelSpec load_spec(const std::string& spec_arg, RunContext* ctx = nullptr);
Dataset load_dataset(const std::string& path, RunContext* ctx = nullptr);

std::string read_text(const std::filesystem::path& path);
std::string format_double(double v);

}  // namespace kerrkit::cli
