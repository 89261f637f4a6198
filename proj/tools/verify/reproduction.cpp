#include "reproduction.hpp"

namespace kerrkit::verify {

NoisePlan noise_plan_for(KernelFamily family, double level, std::uint64_t seed) {
  const NoiseTarget target = family == KernelFamily::RBF ? NoiseTarget::RawFeatures : NoiseTarget::EncodingAmplitude;
  return add_amplitude_noise(level, target, derive_seed(seed, kNoiseStream));
}

GridSearchResult run_table_cell(const Dataset& d, KernelFamily family, const TableCellOptions& options) {
  SplitOptions so;
  so.seed = options.seed;
  so.k_folds = options.scenario == Scenario::CrossValDriven ? options.k_folds : 0;
  const SplitPlan plan = split(d, so);
  GridSearchOptions opts;
  opts.scenario = options.scenario;
  opts.seed = options.seed;
  opts.workers = options.workers;
  return grid_search(d, plan, default_grid(family), opts, noise_plan_for(family, options.noise, options.seed));
}

}  // namespace kerrkit::verify
