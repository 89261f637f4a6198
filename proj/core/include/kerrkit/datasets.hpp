#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace kerrkit {

enum class ScalingMode { PhasePeriodic, AmplitudeBox, ZScore, None };

std::string to_string(ScalingMode m);
ScalingMode parse_scaling_mode(const std::string& s);

// x' = (x - offset) * scale, per feature.
struct ScalingRecord {
  ScalingMode mode = ScalingMode::None;
  Eigen::VectorXd offsets;
  Eigen::VectorXd scales;
};

// PhasePeriodic and AmplitudeBox map the fitted range onto [0, span];
// PhasePeriodic requires span < 2 pi. ZScore and None ignore span.
ScalingRecord fit_scaling(const Eigen::MatrixXd& features, ScalingMode mode, double span);
Eigen::MatrixXd apply_scaling(const ScalingRecord& s, const Eigen::MatrixXd& features);
Eigen::MatrixXd invert_scaling(const ScalingRecord& s, const Eigen::MatrixXd& scaled);

// Largest amplitude box keeping sqrt(|lambda|/2) r inside [0, pi/2).
double amplitude_box_limit(double lambda);

struct Dataset {
  Eigen::MatrixXd features;
  std::vector<int> labels;
  std::string name;
  std::uint64_t seed = 0;
  ScalingRecord scaling;
  // Size of the recommended training portion (0 when unspecified).
  std::size_t n_train = 0;

  std::size_t size() const { return labels.size(); }
  Eigen::Index dims() const { return features.cols(); }
};

// Throws DomainError unless both classes are present, labels are 0/1 and
// all features are finite.
void validate(const Dataset& d);

Dataset subset(const Dataset& d, const std::vector<std::size_t>& rows);

Dataset make_moons(std::size_t n_train, std::size_t n_test, double noise, std::uint64_t seed);
Dataset make_circles(std::size_t n_train, std::size_t n_test, double noise, double factor,
                     std::uint64_t seed);
// Two Gaussian clusters per class centred on distinct vertices of a
// hypercube of side class_sep in the informative coordinates; remaining
// coordinates are unit-variance noise; exactly n_flipped labels flipped.
Dataset make_hypercube(std::size_t n_train, std::size_t n_test, int n_features,
                       int n_informative, double class_sep, std::size_t n_flipped,
                       std::uint64_t seed);
// Concentric rings, layer k labelled k mod 2.
Dataset make_disks(const std::vector<std::size_t>& layer_counts, const std::vector<double>& radii,
                   double jitter, std::uint64_t seed, std::size_t n_train = 0);

enum class DisksPreset { Double, DoubleV2, Triple, Quadruple };
DisksPreset parse_disks_preset(const std::string& s);
Dataset make_disks_preset(DisksPreset preset, std::uint64_t seed);

// Table-style presets: moons-v1, moons-v2, circles-v1, circles-v2,
// hypercube-v1, hypercube-v2, disks-v1, disks-v2, triple, quadruple.
Dataset table_dataset(const std::string& name, std::uint64_t seed);
std::vector<std::string> table_dataset_names();

enum class BreastPartition {
  TrainVal,   // 546 / 78
  TrainTest,  // 546 / 156
};

// MedMNIST-style .npz archive; features are pixels / 255.
Dataset load_breastmnist(const std::string& path, BreastPartition partition = BreastPartition::TrainVal);

// ---- noise --------------------------------------------------------------

enum class NoiseTarget { EncodingAmplitude, RawFeatures };

struct NoisePlan {
  double level = 0.0;
  NoiseTarget target = NoiseTarget::EncodingAmplitude;
  std::uint64_t seed = 0;

  bool active() const { return level > 0.0; }
};

NoisePlan add_amplitude_noise(double level, NoiseTarget target, std::uint64_t seed);

// One N(0, level) draw per (sample, feature), from a stream keyed by the
// sample's row id, so a sample is perturbed identically wherever it appears.
Eigen::MatrixXd noise_offsets(const NoisePlan& plan, const std::vector<std::size_t>& row_ids,
                              Eigen::Index dims);

// ---- splits -------------------------------------------------------------

struct Fold {
  std::vector<std::size_t> train;
  std::vector<std::size_t> validate;
};

struct SplitPlan {
  std::vector<std::size_t> train_idx;
  std::vector<std::size_t> test_idx;
  std::vector<Fold> cv_folds;
  bool stratified = true;
  std::uint64_t seed = 0;
};

struct SplitOptions {
  std::optional<std::size_t> n_train;
  std::optional<double> test_fraction;
  int k_folds = 0;
  bool stratified = true;
  std::uint64_t seed = 0;
};

// Without n_train or test_fraction the dataset's own n_train is used.
SplitPlan split(const Dataset& d, const SplitOptions& options);

// Stratified (or plain) k folds over the given training rows.
std::vector<Fold> make_folds(const Dataset& d, const std::vector<std::size_t>& train_idx, int k,
                             bool stratified, std::uint64_t seed);

// Reorders rows so plan.train_idx comes first; sets n_train.
Dataset train_first(const Dataset& d, const SplitPlan& plan);

// Plan for a train-first dataset: rows [0, n_train) train, the rest test,
// with optional folds over the training rows.
SplitPlan presplit_plan(const Dataset& d, int k_folds = 0, bool stratified = true,
                        std::uint64_t seed = 0);

// ---- files --------------------------------------------------------------

// CSV with header f0..f{d-1},label plus "<path>.json" sidecar.
void write_dataset(const Dataset& d, const std::string& csv_path);
Dataset read_dataset(const std::string& csv_path);

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

}  // namespace kerrkit
