#include "dan/quantize.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace dan {

namespace {

constexpr std::int64_t kRealBytes = 4;  // serialized weight precision

std::int64_t mask_words(Index visible) {
  return (static_cast<std::int64_t>(visible) + 63) / 64;
}

QuantizationReport build_report(const std::vector<Matrix>& weights,
                                const std::vector<double>& thresholds,
                                bool binary_mode) {
  QuantizationReport report;
  std::int64_t with_index = 0;
  for (std::size_t l = 0; l < weights.size(); ++l) {
    const Matrix& w = weights[l];
    LayerQuant layer;
    layer.threshold = thresholds.empty() ? 0.0 : thresholds[l];
    layer.total = static_cast<std::int64_t>(w.size());
    layer.reserved = static_cast<std::int64_t>((w.array() != 0.0).count());
    layer.sigma = layer.total == 0
                      ? 0.0
                      : static_cast<double>(layer.reserved) /
                            static_cast<double>(layer.total);
    report.layers.push_back(layer);
    report.total_weights += layer.total;
    report.reserved_weights += layer.reserved;
    if (binary_mode) {
      // packed layout: one 32-bit bias per hidden unit plus two bit masks
      // of ceil(n/64) words each
      with_index += kRealBytes * w.cols() +
                    2 * 8 * mask_words(w.rows()) * w.cols();
    } else {
      // dense layout: biases b and c plus the full weight matrix
      with_index += kRealBytes * (w.rows() + w.cols() +
                                  static_cast<std::int64_t>(w.size()));
    }
  }
  report.dense_bytes = kRealBytes * report.total_weights;
  report.sparse_real_bytes = kRealBytes * report.reserved_weights;
  report.sparse_binary_bytes = report.reserved_weights / 8;
  report.with_index_bytes = with_index;
  report.kib_dense = std::llround(static_cast<double>(report.dense_bytes) / 1024.0);
  report.kib_sparse_real =
      std::llround(static_cast<double>(report.sparse_real_bytes) / 1024.0);
  report.kib_sparse_binary = report.sparse_binary_bytes / 1024;
  return report;
}

}  // namespace

double sigma(const Matrix& w, double u) {
  if (u < 0.0) throw std::domain_error("sigma: threshold must be >= 0");
  if (w.size() == 0) return 0.0;
  return static_cast<double>((w.array().abs() >= u).count()) /
         static_cast<double>(w.size());
}

double threshold_for_sigma(const Matrix& w, double target) {
  if (!(target > 0.0 && target <= 1.0)) {
    throw std::domain_error("threshold_for_sigma: target must be in (0, 1]");
  }
  const auto n = static_cast<std::size_t>(w.size());
  const auto keep = static_cast<std::size_t>(target * static_cast<double>(n));
  if (keep == n) return 0.0;

  std::vector<double> mags(w.data(), w.data() + w.size());
  for (double& m : mags) m = std::abs(m);
  std::sort(mags.begin(), mags.end(), std::greater<double>());

  if (keep == 0) return std::nextafter(mags.front(), HUGE_VAL);
  const double hi = mags[keep - 1];  // smallest surviving magnitude
  const double lo = mags[keep];      // largest pruned magnitude
  const double mid = lo + (hi - lo) / 2.0;
  // Strictly between the two order statistics both conventions agree:
  // sigma counts |w| >= u, pruning removes |w| <= u.
  if (mid > lo && mid < hi) return mid;
  return hi;  // degenerate gap (ties or adjacent doubles)
}

QuantizedModel sparsify(const DanModel& model,
                        const std::vector<double>& u_per_layer) {
  if (u_per_layer.size() != model.layers.size()) {
    throw std::invalid_argument("sparsify: one threshold per layer required");
  }
  QuantizedModel out;
  out.mode = QuantMode::kSparseReal;
  out.thresholds = u_per_layer;
  for (std::size_t l = 0; l < model.layers.size(); ++l) {
    const Matrix& w = model.layers[l].weights;
    const double u = u_per_layer[l];
    out.weights.push_back(
        (w.array().abs() <= u)
            .select(Matrix::Zero(w.rows(), w.cols()), w));
    out.hidden_biases.push_back(model.layers[l].hidden_bias);
    out.visible_biases.push_back(model.layers[l].visible_bias);
  }
  return out;
}

QuantizedModel sparsify(const DanModel& model, double u) {
  return sparsify(model, std::vector<double>(model.layers.size(), u));
}

QuantizedModel binarize(const QuantizedModel& model) {
  if (model.mode != QuantMode::kSparseReal) {
    throw std::invalid_argument("binarize: expected a sparse-real model");
  }
  QuantizedModel out = model;
  out.mode = QuantMode::kSparseBinary;
  for (Matrix& w : out.weights) {
    w = w.array().sign().matrix();
  }
  return out;
}

QuantizedModel with_binary_features(const QuantizedModel& model) {
  if (model.mode != QuantMode::kSparseBinary) {
    throw std::invalid_argument(
        "with_binary_features: expected a sparse-binary model");
  }
  QuantizedModel out = model;
  out.mode = QuantMode::kSparseBinaryBinaryFeatures;
  out.feature_threshold = 0.5;
  return out;
}

double QuantizationReport::mean_sigma() const {
  if (layers.empty()) return 0.0;
  double s = 0.0;
  for (const LayerQuant& l : layers) s += l.sigma;
  return s / static_cast<double>(layers.size());
}

QuantizationReport memory_report(const DanModel& model) {
  std::vector<Matrix> weights;
  for (const RbmParams& layer : model.layers) weights.push_back(layer.weights);
  return build_report(weights, std::vector<double>(weights.size(), 0.0),
                      /*binary_mode=*/false);
}

QuantizationReport memory_report(const QuantizedModel& model) {
  return build_report(model.weights, model.thresholds,
                      model.mode != QuantMode::kSparseReal);
}

void write_csv(const QuantizationReport& report, std::ostream& out) {
  out << "layer,threshold,sigma,reserved,total,dense_bytes,sparse_real_bytes,"
         "sparse_binary_bytes,with_index_bytes,kib_dense,kib_sparse_real,"
         "kib_sparse_binary\n";
  for (std::size_t l = 0; l < report.layers.size(); ++l) {
    const LayerQuant& layer = report.layers[l];
    out << (l + 1) << ',' << layer.threshold << ',' << layer.sigma << ','
        << layer.reserved << ',' << layer.total << ",,,,,,,\n";
  }
  out << "total,," << report.mean_sigma() << ',' << report.reserved_weights
      << ',' << report.total_weights << ',' << report.dense_bytes << ','
      << report.sparse_real_bytes << ',' << report.sparse_binary_bytes << ','
      << report.with_index_bytes << ',' << report.kib_dense << ','
      << report.kib_sparse_real << ',' << report.kib_sparse_binary << '\n';
}

}  // namespace dan
