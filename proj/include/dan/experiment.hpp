#pragma once

#include "dan/classifier.hpp"
#include "dan/dataset.hpp"
#include "dan/model_io.hpp"
#include "dan/quantize.hpp"
#include "dan/sparse_infer.hpp"
#include "dan/stack.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace dan {

/// A named experiment configuration: network width, sample budget,
/// training hyperparameters and quantization targets.
struct Preset {
  std::string name;
  std::vector<Index> layer_sizes;
  Index train_count = 0;
  Index test_count = 0;
  TrainConfig train;
  double lambda = 1e-4;
  double gamma = 0.5;
  double sigma_sparse = 0.25;  // reserved ratio for the pruned variant
  double sigma_binary = 0.20;  // reserved ratio for the sign-quantized variants
};

/// Full-width benchmark: 784-800-800, 10000 train / 10000 test images.
Preset table_preset();

/// Reduced preset for quick runs: 784-200-200, 2000/2000 images, 15 epochs.
Preset small_preset();

Preset preset_by_name(const std::string& name);

struct MnistPair {
  Dataset train;
  Dataset test;
};

/// Load the IDX files from `dir` (standard MNIST file names) and draw the
/// requested sample counts: training images are subsampled from the train
/// split with Rng(seed).split(9000+...), test images come from the test
/// split (all of it when test_count matches its size).
MnistPair load_mnist(const std::string& dir, Index train_count,
                     Index test_count, std::uint64_t seed);

/// Feedforward features for any model variant (one sample per column).
Matrix dense_features(const std::vector<RbmParams>& layers, const Matrix& data);
Matrix quantized_features(const QuantizedModel& model, const Matrix& data);
Matrix packed_features(const std::vector<SparseBinaryLayer>& layers,
                       const Matrix& data, FeatureMode mode);

/// Per-layer thresholds hitting the target reserved ratio, then the
/// requested quantization mode.
QuantizedModel quantize_at_sigma(const DanModel& model, double target_sigma,
                                 QuantMode mode);
QuantizedModel quantize_at_threshold(const DanModel& model, double u,
                                     QuantMode mode);

/// Retrain a head on this variant's training features and report test
/// accuracy. The head seed is derived from `seed`.
double eval_accuracy(const DanModel& model, const MnistPair& data,
                     std::uint64_t seed);
double eval_accuracy(const QuantizedModel& model, const MnistPair& data,
                     std::uint64_t seed);

struct VariantResult {
  std::string method;
  int weight_bits = 32;
  int feature_bits = 32;
  double sigma_mean = 1.0;
  std::int64_t kib_weights = 0;     // weight-only accounting
  std::int64_t kib_serialized = 0;  // packed on-disk accounting
  double accuracy = 0.0;
};

struct PipelineResult {
  std::vector<VariantResult> rows;  // DBN, DAN, DAN_s, DAN_b, DAN_B
  DanModel dbn;
  DanModel dan;
};

/// The five-variant comparison for one seed: train the unregularized and
/// the mixed-decay stacks, prune/quantize, retrain a head per variant.
/// Progress lines go to `log` when given.
PipelineResult run_table_pipeline(const MnistPair& data, const Preset& preset,
                                  std::uint64_t seed, std::ostream* log);

struct TrainedSummary {
  std::vector<double> sigma_u01;  // per layer, reserved ratio at u = 0.1
  std::vector<double> row_norms;  // per layer, sum of row lengths
  std::vector<double> col_norms;  // per layer, sum of column lengths
  double accuracy = -1.0;         // only when requested
  DanModel model;
};

/// Train one stack and summarize the statistics the sweeps report.
TrainedSummary train_summary(const MnistPair& data, const Preset& preset,
                             RegKind kind, double lambda, double gamma,
                             std::uint64_t seed, bool with_accuracy,
                             std::ostream* log);

/// CSV row protocol shared by the sweep and report commands.
void write_variant_csv_header(std::ostream& out);
void write_variant_csv_row(std::ostream& out, const VariantResult& row);

}  // namespace dan
