#pragma once

#include "dan/stack.hpp"

#include <cstdint>
#include <ostream>
#include <vector>

namespace dan {

/// Fraction of entries with |w| >= u (the reserved-weight ratio).
double sigma(const Matrix& w, double u);

/// Smallest threshold u with sigma(w, u) <= target, placed strictly
/// between the order statistics of |w| so that pruning with it (zero iff
/// |w| <= u) reserves exactly floor(target * size) entries (ties broken by
/// magnitude order). Throws std::domain_error unless 0 < target <= 1.
double threshold_for_sigma(const Matrix& w, double target);

enum class QuantMode {
  kSparseReal,                  // pruned, real-valued weights
  kSparseBinary,                // pruned, sign-quantized weights, real features
  kSparseBinaryBinaryFeatures,  // as above with features thresholded at 0.5
};

/// A pruned (and possibly sign-quantized) network. Weight matrices keep
/// their dense shape with exact zeros at pruned positions; biases are
/// copied bit-exactly from the source model and never quantized.
struct QuantizedModel {
  QuantMode mode = QuantMode::kSparseReal;
  std::vector<Matrix> weights;
  std::vector<Vector> hidden_biases;
  std::vector<Vector> visible_biases;
  std::vector<double> thresholds;   // per layer
  double feature_threshold = 0.5;   // binary-features mode only

  Index layer_count() const { return static_cast<Index>(weights.size()); }
};

/// Zero all weights with |w| <= u (one threshold per layer, or one shared
/// threshold). Real values are kept for the surviving weights.
QuantizedModel sparsify(const DanModel& model,
                        const std::vector<double>& u_per_layer);
QuantizedModel sparsify(const DanModel& model, double u);

/// Replace surviving weights by their sign (+1/-1); the zero pattern is
/// preserved. Requires a sparse-real input model.
QuantizedModel binarize(const QuantizedModel& model);

/// Switch a sign-quantized model to binary-feature evaluation (features
/// thresholded at 0.5 per layer). Requires a sparse-binary input model.
QuantizedModel with_binary_features(const QuantizedModel& model);

struct LayerQuant {
  double threshold = 0.0;
  double sigma = 1.0;             // reserved / total
  std::int64_t reserved = 0;      // nonzero weights
  std::int64_t total = 0;
};

/// Weight-memory accounting. The *_bytes totals count weights only
/// (32-bit reals, 1-bit signs); with_index_bytes additionally counts the
/// bytes the packed on-disk layout actually needs (per-unit sign masks,
/// plus the 32-bit biases in the binary case). The kib_* figures are the
/// table-style whole-KiB numbers: rounded for real-valued storage,
/// truncated for bit storage.
struct QuantizationReport {
  std::vector<LayerQuant> layers;
  std::int64_t total_weights = 0;
  std::int64_t reserved_weights = 0;
  std::int64_t dense_bytes = 0;
  std::int64_t sparse_real_bytes = 0;
  std::int64_t sparse_binary_bytes = 0;
  std::int64_t with_index_bytes = 0;
  std::int64_t kib_dense = 0;
  std::int64_t kib_sparse_real = 0;
  std::int64_t kib_sparse_binary = 0;

  double mean_sigma() const;
};

QuantizationReport memory_report(const DanModel& model);
QuantizationReport memory_report(const QuantizedModel& model);

/// One row per layer plus a totals row.
void write_csv(const QuantizationReport& report, std::ostream& out);

}  // namespace dan
