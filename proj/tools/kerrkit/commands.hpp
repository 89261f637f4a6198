#pragma once

#include <functional>
#include <vector>

#include <CLI11.hpp>

#include "run_context.hpp"

namespace kerrkit::cli {

struct Command {
  CLI::App* app = nullptr;
  std::function<void(RunContext&)> run;
};

void register_gen_data(CLI::App& root, std::vector<Command>& out);
void register_gram(CLI::App& root, std::vector<Command>& out);
void register_train(CLI::App& root, std::vector<Command>& out);
void register_grid_search(CLI::App& root, std::vector<Command>& out);
void register_verify(CLI::App& root, std::vector<Command>& out);
void register_lattice(CLI::App& root, std::vector<Command>& out);
void register_bench(CLI::App& root, std::vector<Command>& out);

}  // namespace kerrkit::cli
