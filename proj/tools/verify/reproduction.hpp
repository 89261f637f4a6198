#pragma once

#include <cstdint>

#include "kerrkit/grid_search.hpp"

namespace kerrkit::verify {

// Stream id for encoding-noise draws, shared by every command.
inline constexpr std::uint64_t kNoiseStream = 0x4015e;

// Encoding noise for Kerr-type families, raw-feature noise for RBF.
NoisePlan noise_plan_for(KernelFamily family, double level, std::uint64_t seed);

struct TableCellOptions {
  Scenario scenario = Scenario::TestDriven;
  double noise = 0.0;
  std::uint64_t seed = 7;
  int workers = 1;
  int k_folds = 5;  // CrossValDriven only
};

// One benchmark-table cell: the dataset's own split, the family's default
// grid and the given scenario.
GridSearchResult run_table_cell(const Dataset& d, KernelFamily family, const TableCellOptions& options);

}  // namespace kerrkit::verify
