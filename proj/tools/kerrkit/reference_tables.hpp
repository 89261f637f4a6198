#pragma once

#include <optional>
#include <string>
#include <vector>

namespace kerrkit::cli {

// Published percentages for the benchmark tables, used only as comparison
// columns. Each cell holds one value per field ("cv", "test", "train" or
// "accuracy"); missing cells are empty.
struct ReferenceTable {
  int id = 0;
  std::string metric;               // "f1" or "accuracy"
  std::vector<std::string> fields;  // per-cell value order
  std::vector<std::string> kernels;
  struct Row {
    std::string dataset;
    double noise = 0.0;
    std::vector<std::string> cells;  // "93.88/93.33" style, one per kernel
  };
  std::vector<Row> rows;
};

// Tables 2 to 6; throws DomainError otherwise.
const ReferenceTable& reference_table(int id);

// Values of one cell, split on '/'; empty when the kernel has no entry.
std::vector<double> reference_values(const ReferenceTable& t, const std::string& dataset, double noise,
                                     const std::string& kernel);

// Comparison-only baselines of table 5 (accuracy, %).
struct Baseline {
  std::string name;
  double accuracy;
};
const std::vector<Baseline>& breast_baselines();

}  // namespace kerrkit::cli
