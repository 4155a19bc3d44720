#include "dan/experiment.hpp"

#include "dan/regularizer.hpp"

#include <iostream>
#include <ostream>
#include <stdexcept>

namespace dan {

namespace {

constexpr std::uint64_t kTrainSampleStream = 9001;
constexpr std::uint64_t kTestSampleStream = 9002;
constexpr std::uint64_t kHeadStream = 9100;

HeadConfig head_config(std::uint64_t seed) {
  HeadConfig cfg;
  cfg.seed = Rng(seed).split(kHeadStream).seed();
  return cfg;
}

std::vector<double> sigma_targets(const DanModel& model, double target) {
  std::vector<double> thresholds;
  for (const RbmParams& layer : model.layers) {
    thresholds.push_back(threshold_for_sigma(layer.weights, target));
  }
  return thresholds;
}

double head_accuracy(const Matrix& train_features, const std::vector<int>& train_labels,
                     const Matrix& test_features, const std::vector<int>& test_labels,
                     std::uint64_t seed) {
  const ClassifierHead head =
      train_head(train_features, train_labels, 10, head_config(seed));
  return accuracy(head, test_features, test_labels);
}

}  // namespace

Preset table_preset() {
  Preset preset;
  preset.name = "table2";
  preset.layer_sizes = {784, 800, 800};
  preset.train_count = 10000;
  preset.test_count = 10000;
  preset.train = TrainConfig{};
  preset.lambda = 1e-4;
  preset.gamma = 0.5;
  preset.sigma_sparse = 0.25;
  preset.sigma_binary = 0.20;
  return preset;
}

Preset small_preset() {
  Preset preset = table_preset();
  preset.name = "small";
  preset.layer_sizes = {784, 200, 200};
  preset.train_count = 2000;
  preset.test_count = 2000;
  preset.train.epochs = 15;
  return preset;
}

Preset preset_by_name(const std::string& name) {
  if (name == "table2") return table_preset();
  if (name == "small") return small_preset();
  throw std::invalid_argument("unknown preset: " + name);
}

MnistPair load_mnist(const std::string& dir, Index train_count,
                     Index test_count, std::uint64_t seed) {
  const Dataset full_train = load_idx(dir + "/train-images-idx3-ubyte",
                                      dir + "/train-labels-idx1-ubyte");
  const Dataset full_test = load_idx(dir + "/t10k-images-idx3-ubyte",
                                     dir + "/t10k-labels-idx1-ubyte");
  MnistPair pair;
  Rng train_rng = Rng(seed).split(kTrainSampleStream);
  pair.train = subsample(train_rng, full_train, train_count);
  if (test_count == full_test.size()) {
    pair.test = full_test;
  } else {
    Rng test_rng = Rng(seed).split(kTestSampleStream);
    pair.test = subsample(test_rng, full_test, test_count);
  }
  return pair;
}

Matrix dense_features(const std::vector<RbmParams>& layers, const Matrix& data) {
  Matrix current = data;
  for (const RbmParams& layer : layers) {
    current = hidden_probabilities(layer, current);
  }
  return current;
}

Matrix packed_features(const std::vector<SparseBinaryLayer>& layers,
                       const Matrix& data, FeatureMode mode) {
  if (layers.empty()) return data;
  Matrix out(layers.back().hidden_count, data.cols());
  for (Index k = 0; k < data.cols(); ++k) {
    out.col(k) = run_network(layers, data.col(k), mode);
  }
  return out;
}

Matrix quantized_features(const QuantizedModel& model, const Matrix& data) {
  if (model.mode == QuantMode::kSparseReal) {
    Matrix current = data;
    for (Index l = 0; l < model.layer_count(); ++l) {
      const auto u = static_cast<std::size_t>(l);
      RbmParams layer;
      layer.weights = model.weights[u];
      layer.hidden_bias = model.hidden_biases[u];
      layer.visible_bias = model.visible_biases[u];
      current = hidden_probabilities(layer, current);
    }
    return current;
  }
  const FeatureMode mode = model.mode == QuantMode::kSparseBinary
                               ? FeatureMode::kReal
                               : FeatureMode::kBinary;
  return packed_features(pack_network(model), data, mode);
}

QuantizedModel quantize_at_sigma(const DanModel& model, double target_sigma,
                                 QuantMode mode) {
  QuantizedModel pruned = sparsify(model, sigma_targets(model, target_sigma));
  if (mode == QuantMode::kSparseReal) return pruned;
  QuantizedModel binary = binarize(pruned);
  if (mode == QuantMode::kSparseBinary) return binary;
  return with_binary_features(binary);
}

QuantizedModel quantize_at_threshold(const DanModel& model, double u,
                                     QuantMode mode) {
  QuantizedModel pruned = sparsify(model, u);
  if (mode == QuantMode::kSparseReal) return pruned;
  QuantizedModel binary = binarize(pruned);
  if (mode == QuantMode::kSparseBinary) return binary;
  return with_binary_features(binary);
}

double eval_accuracy(const DanModel& model, const MnistPair& data,
                     std::uint64_t seed) {
  const Matrix train_features = dense_features(model.layers, data.train.images);
  const Matrix test_features = dense_features(model.layers, data.test.images);
  return head_accuracy(train_features, data.train.labels, test_features,
                       data.test.labels, seed);
}

double eval_accuracy(const QuantizedModel& model, const MnistPair& data,
                     std::uint64_t seed) {
  const Matrix train_features = quantized_features(model, data.train.images);
  const Matrix test_features = quantized_features(model, data.test.images);
  return head_accuracy(train_features, data.train.labels, test_features,
                       data.test.labels, seed);
}

PipelineResult run_table_pipeline(const MnistPair& data, const Preset& preset,
                                  std::uint64_t seed, std::ostream* log) {
  const auto progress = [log](const LayerProgress& p) {
    if (log != nullptr) {
      (*log) << "layer " << p.layer << " epoch " << p.epoch << " recon "
             << p.reconstruction_error << " sigma@0.1 " << p.sigma_at_0_1
             << '\n';
    }
  };

  TrainConfig train_cfg = preset.train;
  train_cfg.seed = seed;

  RegularizerConfig none;
  RegularizerConfig mixed;
  mixed.kind = RegKind::kMixed;
  mixed.lambda = preset.lambda;
  mixed.gamma = preset.gamma;

  if (log != nullptr) (*log) << "training unregularized stack\n";
  PipelineResult result;
  result.dbn = train_stack(data.train.images, preset.layer_sizes, train_cfg,
                           none, progress);
  if (log != nullptr) (*log) << "training mixed-decay stack\n";
  result.dan = train_stack(data.train.images, preset.layer_sizes, train_cfg,
                           mixed, progress);

  result.dbn.provenance.dataset_hash = data.train.source_hash;
  result.dan.provenance.dataset_hash = data.train.source_hash;

  const QuantizedModel dan_s =
      quantize_at_sigma(result.dan, preset.sigma_sparse, QuantMode::kSparseReal);
  const QuantizedModel dan_b =
      quantize_at_sigma(result.dan, preset.sigma_binary, QuantMode::kSparseBinary);
  const QuantizedModel dan_bb = with_binary_features(dan_b);

  const QuantizationReport dense_report = memory_report(result.dan);
  const QuantizationReport report_s = memory_report(dan_s);
  const QuantizationReport report_b = memory_report(dan_b);

  const auto kib_rounded = [](std::int64_t bytes) {
    return std::int64_t((bytes + 512) / 1024);
  };

  if (log != nullptr) (*log) << "evaluating variants\n";
  result.rows = {
      VariantResult{"DBN", 32, 32, 1.0, dense_report.kib_dense,
                    kib_rounded(dense_report.with_index_bytes),
                    eval_accuracy(result.dbn, data, seed)},
      VariantResult{"DAN", 32, 32, 1.0, dense_report.kib_dense,
                    kib_rounded(dense_report.with_index_bytes),
                    eval_accuracy(result.dan, data, seed)},
      VariantResult{"DAN_s", 32, 32, report_s.mean_sigma(),
                    report_s.kib_sparse_real,
                    kib_rounded(report_s.with_index_bytes),
                    eval_accuracy(dan_s, data, seed)},
      VariantResult{"DAN_b", 1, 32, report_b.mean_sigma(),
                    report_b.kib_sparse_binary,
                    kib_rounded(report_b.with_index_bytes),
                    eval_accuracy(dan_b, data, seed)},
      VariantResult{"DAN_B", 1, 1, report_b.mean_sigma(),
                    report_b.kib_sparse_binary,
                    kib_rounded(report_b.with_index_bytes),
                    eval_accuracy(dan_bb, data, seed)},
  };
  return result;
}

TrainedSummary train_summary(const MnistPair& data, const Preset& preset,
                             RegKind kind, double lambda, double gamma,
                             std::uint64_t seed, bool with_accuracy,
                             std::ostream* log) {
  TrainConfig train_cfg = preset.train;
  train_cfg.seed = seed;
  RegularizerConfig reg;
  reg.kind = kind;
  reg.lambda = lambda;
  reg.gamma = gamma;

  const auto progress = [log](const LayerProgress& p) {
    if (log != nullptr) {
      (*log) << "layer " << p.layer << " epoch " << p.epoch << " recon "
             << p.reconstruction_error << " sigma@0.1 " << p.sigma_at_0_1
             << '\n';
    }
  };

  TrainedSummary summary;
  summary.model = train_stack(data.train.images, preset.layer_sizes, train_cfg,
                              reg, progress);
  for (const RbmParams& layer : summary.model.layers) {
    summary.sigma_u01.push_back(sigma(layer.weights, 0.1));
    summary.row_norms.push_back(mixed_norm(layer.weights));
    summary.col_norms.push_back(mixed_norm(layer.weights.transpose()));
  }
  if (with_accuracy) {
    summary.accuracy = eval_accuracy(summary.model, data, seed);
  }
  return summary;
}

void write_variant_csv_header(std::ostream& out) {
  out << "method,weight_bits,feature_bits,sigma,kib_weights,kib_serialized,"
         "accuracy\n";
}

void write_variant_csv_row(std::ostream& out, const VariantResult& row) {
  out << row.method << ',' << row.weight_bits << ',' << row.feature_bits << ','
      << row.sigma_mean << ',' << row.kib_weights << ',' << row.kib_serialized
      << ',' << row.accuracy << '\n';
}

}  // namespace dan
