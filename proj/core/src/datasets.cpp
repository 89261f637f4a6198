#include "kerrkit/datasets.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <set>

#include "kerrkit/error.hpp"
#include "random.hpp"

namespace kerrkit {

using detail::Rng;

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  // splitmix64 finalizer over a combined key.
  std::uint64_t z = seed ^ (stream * 0x9E3779B97F4A7C15ULL + 0x632BE59BD9B4E019ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

void validate(const Dataset& d) {
  if (d.features.rows() == 0 || d.features.cols() == 0) throw DomainError("dataset is empty");
  if (static_cast<std::size_t>(d.features.rows()) != d.labels.size()) {
    throw DomainError("feature rows and label count differ");
  }
  bool seen[2] = {false, false};
  for (int y : d.labels) {
    if (y != 0 && y != 1) throw DomainError("labels must be 0 or 1");
    seen[y] = true;
  }
  if (!seen[0] || !seen[1]) throw DomainError("dataset must contain both classes");
  if (!d.features.allFinite()) throw DomainError("dataset contains non-finite features");
  if (d.n_train > d.size()) throw DomainError("n_train exceeds dataset size");
}

Dataset subset(const Dataset& d, const std::vector<std::size_t>& rows) {
  Dataset out;
  out.name = d.name;
  out.seed = d.seed;
  out.scaling = d.scaling;
  out.features.resize(static_cast<Eigen::Index>(rows.size()), d.features.cols());
  out.labels.reserve(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i] >= d.size()) throw DomainError("subset row index out of range");
    out.features.row(static_cast<Eigen::Index>(i)) = d.features.row(static_cast<Eigen::Index>(rows[i]));
    out.labels.push_back(d.labels[rows[i]]);
  }
  return out;
}

namespace {

// Shuffle rows so classes are interleaved; generators build class blocks.
void shuffle_rows(Dataset& d, Rng& rng) {
  auto order = detail::iota(d.size());
  detail::shuffle(order, rng);
  Dataset s = subset(d, order);
  d.features = std::move(s.features);
  d.labels = std::move(s.labels);
}

void require_counts(std::size_t n_train, std::size_t n_test) {
  if (n_train == 0 || n_test == 0) throw DomainError("train and test counts must be positive");
}

std::vector<std::size_t> even_split(std::size_t total, std::size_t parts) {
  std::vector<std::size_t> out(parts, total / parts);
  for (std::size_t k = 0; k < total % parts; ++k) ++out[k];
  return out;
}

}  // namespace

Dataset make_moons(std::size_t n_train, std::size_t n_test, double noise, std::uint64_t seed) {
  require_counts(n_train, n_test);
  if (!(noise >= 0.0)) throw DomainError("noise must be >= 0");
  const std::size_t n = n_train + n_test;
  const std::size_t n0 = n / 2;
  Rng rng(seed);
  Dataset d;
  d.name = "moons";
  d.seed = seed;
  d.n_train = n_train;
  d.features.resize(static_cast<Eigen::Index>(n), 2);
  d.labels.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = detail::uniform(rng, 0.0, std::numbers::pi);
    const auto r = static_cast<Eigen::Index>(i);
    if (i < n0) {
      d.features(r, 0) = std::cos(t);
      d.features(r, 1) = std::sin(t);
      d.labels[i] = 0;
    } else {
      d.features(r, 0) = 1.0 - std::cos(t);
      d.features(r, 1) = 0.5 - std::sin(t);
      d.labels[i] = 1;
    }
  }
  if (noise > 0.0) {
    for (Eigen::Index i = 0; i < d.features.size(); ++i) d.features.data()[i] += detail::normal(rng, noise);
  }
  shuffle_rows(d, rng);
  return d;
}

Dataset make_circles(std::size_t n_train, std::size_t n_test, double noise, double factor,
                     std::uint64_t seed) {
  require_counts(n_train, n_test);
  if (!(noise >= 0.0)) throw DomainError("noise must be >= 0");
  if (!(factor > 0.0 && factor < 1.0)) throw DomainError("factor must lie in (0, 1)");
  const std::size_t n = n_train + n_test;
  const std::size_t n0 = n / 2;
  Rng rng(seed);
  Dataset d;
  d.name = "circles";
  d.seed = seed;
  d.n_train = n_train;
  d.features.resize(static_cast<Eigen::Index>(n), 2);
  d.labels.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = detail::uniform(rng, 0.0, 2.0 * std::numbers::pi);
    const double rad = i < n0 ? 1.0 : factor;
    const auto r = static_cast<Eigen::Index>(i);
    d.features(r, 0) = rad * std::cos(t);
    d.features(r, 1) = rad * std::sin(t);
    d.labels[i] = i < n0 ? 0 : 1;
  }
  if (noise > 0.0) {
    for (Eigen::Index i = 0; i < d.features.size(); ++i) d.features.data()[i] += detail::normal(rng, noise);
  }
  shuffle_rows(d, rng);
  return d;
}

Dataset make_hypercube(std::size_t n_train, std::size_t n_test, int n_features, int n_informative,
                       double class_sep, std::size_t n_flipped, std::uint64_t seed) {
  require_counts(n_train, n_test);
  if (n_informative < 2 || n_informative > n_features) {
    throw DomainError("need 2 <= n_informative <= n_features");
  }
  if (n_informative > 30) throw DomainError("n_informative must be <= 30");
  if (!(class_sep > 0.0)) throw DomainError("class_sep must be > 0");
  const std::size_t n = n_train + n_test;
  if (n_flipped >= n) throw DomainError("n_flipped must be below the sample count");

  Rng rng(seed);
  // Four distinct vertices: two clusters per class.
  std::set<std::uint32_t> chosen;
  std::vector<std::uint32_t> vertices;
  const std::uint32_t n_vertices = 1u << n_informative;
  while (vertices.size() < 4) {
    const auto v = static_cast<std::uint32_t>(detail::uniform_index(rng, n_vertices));
    if (chosen.insert(v).second) vertices.push_back(v);
  }

  Dataset d;
  d.name = "hypercube";
  d.seed = seed;
  d.n_train = n_train;
  d.features.resize(static_cast<Eigen::Index>(n), n_features);
  d.labels.resize(n);
  const auto per_cluster = even_split(n, 4);
  std::size_t row = 0;
  for (int c = 0; c < 4; ++c) {
    for (std::size_t k = 0; k < per_cluster[c]; ++k, ++row) {
      const auto r = static_cast<Eigen::Index>(row);
      for (int f = 0; f < n_features; ++f) {
        double centre = 0.0;
        if (f < n_informative) centre = ((vertices[c] >> f) & 1u ? 0.5 : -0.5) * class_sep;
        d.features(r, f) = centre + detail::normal(rng);
      }
      d.labels[row] = c % 2;
    }
  }
  // Flips use their own stream so geometry and row order do not depend on
  // n_flipped.
  Rng flip_rng(derive_seed(seed, 1));
  auto idx = detail::iota(n);
  for (std::size_t k = 0; k < n_flipped; ++k) {
    std::swap(idx[k], idx[k + detail::uniform_index(flip_rng, n - k)]);
    d.labels[idx[k]] = 1 - d.labels[idx[k]];
  }
  shuffle_rows(d, rng);
  return d;
}

Dataset make_disks(const std::vector<std::size_t>& layer_counts, const std::vector<double>& radii,
                   double jitter, std::uint64_t seed, std::size_t n_train) {
  if (layer_counts.size() < 2 || layer_counts.size() != radii.size()) {
    throw DomainError("need matching layer_counts and radii with at least two layers");
  }
  for (std::size_t k = 0; k < radii.size(); ++k) {
    if (!(radii[k] > 0.0)) throw DomainError("radii must be positive");
    if (k > 0 && !(radii[k] > radii[k - 1])) throw DomainError("radii must be strictly increasing");
    if (layer_counts[k] == 0) throw DomainError("layer counts must be positive");
  }
  if (!(jitter >= 0.0)) throw DomainError("jitter must be >= 0");
  std::size_t n = 0;
  for (auto c : layer_counts) n += c;
  if (n_train >= n) throw DomainError("n_train must be below the sample count");

  Rng rng(seed);
  Dataset d;
  d.name = "disks";
  d.seed = seed;
  d.n_train = n_train;
  d.features.resize(static_cast<Eigen::Index>(n), 2);
  d.labels.resize(n);
  std::size_t row = 0;
  for (std::size_t k = 0; k < layer_counts.size(); ++k) {
    for (std::size_t i = 0; i < layer_counts[k]; ++i, ++row) {
      const double t = detail::uniform(rng, 0.0, 2.0 * std::numbers::pi);
      const double rad = jitter > 0.0 ? radii[k] + detail::normal(rng, jitter) : radii[k];
      const auto r = static_cast<Eigen::Index>(row);
      d.features(r, 0) = rad * std::cos(t);
      d.features(r, 1) = rad * std::sin(t);
      d.labels[row] = static_cast<int>(k % 2);
    }
  }
  shuffle_rows(d, rng);
  return d;
}

DisksPreset parse_disks_preset(const std::string& s) {
  if (s == "double") return DisksPreset::Double;
  if (s == "double-v2" || s == "double_v2") return DisksPreset::DoubleV2;
  if (s == "triple") return DisksPreset::Triple;
  if (s == "quadruple") return DisksPreset::Quadruple;
  throw DomainError("unknown disks preset '" + s + "' (double, double-v2, triple, quadruple)");
}

Dataset make_disks_preset(DisksPreset preset, std::uint64_t seed) {
  std::size_t n_train = 0, n_test = 0;
  std::vector<double> radii;
  double jitter = 0.1;
  std::string name;
  switch (preset) {
    case DisksPreset::Double:
      n_train = 80, n_test = 15, radii = {1.0, 1.5}, jitter = 0.2, name = "disks-v1";
      break;
    case DisksPreset::DoubleV2:
      n_train = 105, n_test = 20, radii = {1.0, 2.0}, name = "disks-v2";
      break;
    case DisksPreset::Triple:
      n_train = 306, n_test = 54, radii = {1.0, 2.0, 3.0}, name = "triple";
      break;
    case DisksPreset::Quadruple:
      n_train = 367, n_test = 65, radii = {1.0, 2.0, 3.0, 4.0}, name = "quadruple";
      break;
  }
  Dataset d = make_disks(even_split(n_train + n_test, radii.size()), radii, jitter, seed, n_train);
  d.name = name;
  return d;
}

std::vector<std::string> table_dataset_names() {
  return {"moons-v1",     "moons-v2",     "circles-v1", "circles-v2", "hypercube-v1",
          "hypercube-v2", "disks-v1",     "disks-v2",   "triple",     "quadruple"};
}

Dataset table_dataset(const std::string& name, std::uint64_t seed) {
  Dataset d;
  if (name == "moons-v1") d = make_moons(300, 100, 0.25, seed);
  else if (name == "moons-v2") d = make_moons(645, 215, 0.25, seed);
  else if (name == "circles-v1") d = make_circles(300, 100, 0.1, 0.8, seed);
  else if (name == "circles-v2") d = make_circles(645, 215, 0.1, 0.8, seed);
  else if (name == "hypercube-v1") d = make_hypercube(300, 100, 8, 4, 8.0, 40, seed);
  else if (name == "hypercube-v2") d = make_hypercube(645, 215, 8, 4, 8.0, 86, seed);
  else if (name == "disks-v1") return make_disks_preset(DisksPreset::Double, seed);
  else if (name == "disks-v2") return make_disks_preset(DisksPreset::DoubleV2, seed);
  else if (name == "triple") return make_disks_preset(DisksPreset::Triple, seed);
  else if (name == "quadruple") return make_disks_preset(DisksPreset::Quadruple, seed);
  else throw DomainError("unknown dataset '" + name + "'");
  d.name = name;
  return d;
}

// ---- noise --------------------------------------------------------------

NoisePlan add_amplitude_noise(double level, NoiseTarget target, std::uint64_t seed) {
  if (!(level >= 0.0)) throw DomainError("noise level must be >= 0");
  return NoisePlan{level, target, seed};
}

Eigen::MatrixXd noise_offsets(const NoisePlan& plan, const std::vector<std::size_t>& row_ids,
                              Eigen::Index dims) {
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(row_ids.size()), dims);
  if (!plan.active()) return out;
  for (std::size_t i = 0; i < row_ids.size(); ++i) {
    Rng rng(derive_seed(plan.seed, row_ids[i]));
    for (Eigen::Index f = 0; f < dims; ++f) out(static_cast<Eigen::Index>(i), f) = detail::normal(rng, plan.level);
  }
  return out;
}

// ---- splits -------------------------------------------------------------

SplitPlan split(const Dataset& d, const SplitOptions& o) {
  const std::size_t n = d.size();
  std::size_t n_train = 0;
  if (o.n_train) {
    n_train = *o.n_train;
  } else if (o.test_fraction) {
    if (!(*o.test_fraction > 0.0 && *o.test_fraction < 1.0)) {
      throw DomainError("test_fraction must lie in (0, 1)");
    }
    n_train = static_cast<std::size_t>(std::llround((1.0 - *o.test_fraction) * static_cast<double>(n)));
  } else {
    n_train = d.n_train;
  }
  if (n_train == 0 || n_train >= n) {
    throw DomainError("infeasible split: n_train = " + std::to_string(n_train) + " of " +
                      std::to_string(n) + " samples");
  }

  Rng rng(derive_seed(o.seed, 0x5eed));
  SplitPlan plan;
  plan.stratified = o.stratified;
  plan.seed = o.seed;

  std::vector<std::vector<std::size_t>> by_class(2);
  for (std::size_t i = 0; i < n; ++i) by_class[d.labels[i] == 1 ? 1 : 0].push_back(i);

  if (o.stratified) {
    // Largest-remainder quotas per class.
    std::size_t quota[2];
    double frac[2];
    std::size_t assigned = 0;
    for (int c = 0; c < 2; ++c) {
      const double exact = static_cast<double>(n_train) * by_class[c].size() / static_cast<double>(n);
      quota[c] = static_cast<std::size_t>(std::floor(exact));
      frac[c] = exact - std::floor(exact);
      assigned += quota[c];
    }
    while (assigned < n_train) {
      const int c = frac[1] > frac[0] ? 1 : 0;
      ++quota[c];
      frac[c] = -1.0;
      ++assigned;
    }
    for (int c = 0; c < 2; ++c) {
      auto members = by_class[c];
      detail::shuffle(members, rng);
      plan.train_idx.insert(plan.train_idx.end(), members.begin(), members.begin() + quota[c]);
      plan.test_idx.insert(plan.test_idx.end(), members.begin() + quota[c], members.end());
    }
  } else {
    auto all = detail::iota(n);
    detail::shuffle(all, rng);
    plan.train_idx.assign(all.begin(), all.begin() + n_train);
    plan.test_idx.assign(all.begin() + n_train, all.end());
  }
  std::sort(plan.train_idx.begin(), plan.train_idx.end());
  std::sort(plan.test_idx.begin(), plan.test_idx.end());

  if (o.k_folds != 0) plan.cv_folds = make_folds(d, plan.train_idx, o.k_folds, o.stratified, o.seed);
  return plan;
}

std::vector<Fold> make_folds(const Dataset& d, const std::vector<std::size_t>& train_idx, int k_folds,
                             bool stratified, std::uint64_t seed) {
  if (k_folds < 2) throw DomainError("k_folds must be >= 2");
  const auto k = static_cast<std::size_t>(k_folds);
  if (k > train_idx.size()) throw DomainError("more folds than training samples");
  Rng rng(derive_seed(seed, 0xf01d));
  std::vector<std::vector<std::size_t>> folds(k);
  std::size_t next = 0;
  // Dealing round-robin keeps fold sizes and per-class counts within one.
  auto deal = [&](std::vector<std::size_t> members) {
    detail::shuffle(members, rng);
    for (auto i : members) folds[next++ % k].push_back(i);
  };
  if (stratified) {
    std::vector<std::size_t> by_class[2];
    for (auto i : train_idx) by_class[d.labels.at(i) == 1 ? 1 : 0].push_back(i);
    deal(by_class[0]);
    deal(by_class[1]);
  } else {
    deal(train_idx);
  }
  std::vector<Fold> out;
  for (std::size_t f = 0; f < k; ++f) {
    Fold fold;
    fold.validate = folds[f];
    std::sort(fold.validate.begin(), fold.validate.end());
    for (std::size_t g = 0; g < k; ++g) {
      if (g != f) fold.train.insert(fold.train.end(), folds[g].begin(), folds[g].end());
    }
    std::sort(fold.train.begin(), fold.train.end());
    out.push_back(std::move(fold));
  }
  return out;
}

Dataset train_first(const Dataset& d, const SplitPlan& plan) {
  std::vector<std::size_t> order = plan.train_idx;
  order.insert(order.end(), plan.test_idx.begin(), plan.test_idx.end());
  if (order.size() != d.size()) throw DomainError("split plan does not cover the dataset");
  Dataset out = subset(d, order);
  out.n_train = plan.train_idx.size();
  return out;
}

SplitPlan presplit_plan(const Dataset& d, int k_folds, bool stratified, std::uint64_t seed) {
  if (d.n_train == 0 || d.n_train >= d.size()) {
    throw DomainError("dataset has no recorded train/test boundary (n_train)");
  }
  SplitPlan plan;
  plan.stratified = stratified;
  plan.seed = seed;
  for (std::size_t i = 0; i < d.size(); ++i) (i < d.n_train ? plan.train_idx : plan.test_idx).push_back(i);
  if (k_folds != 0) plan.cv_folds = make_folds(d, plan.train_idx, k_folds, stratified, seed);
  return plan;
}

}  // namespace kerrkit
