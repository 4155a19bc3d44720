#include "dan/stack.hpp"

#include <stdexcept>
#include <utility>

namespace dan {

namespace {

double reserved_ratio(const Matrix& w, double u) {
  const auto reserved =
      (w.array().abs() >= u).count();
  return static_cast<double>(reserved) / static_cast<double>(w.size());
}

Matrix gather_columns(const Matrix& data, const std::vector<std::int32_t>& idx,
                      std::size_t first, std::size_t count) {
  Matrix out(data.rows(), static_cast<Index>(count));
  for (std::size_t k = 0; k < count; ++k) {
    out.col(static_cast<Index>(k)) = data.col(idx[first + k]);
  }
  return out;
}

}  // namespace

void DanModel::validate() const {
  for (std::size_t t = 0; t < layers.size(); ++t) {
    layers[t].validate();
    if (t + 1 < layers.size() &&
        layers[t].hidden_count() != layers[t + 1].visible_count()) {
      throw std::invalid_argument("layer dimensions do not chain");
    }
  }
}

RbmParams train_rbm(Rng& rng, const Matrix& data, Index hidden_count,
                    const TrainConfig& train_cfg,
                    const RegularizerConfig& reg_cfg, VisibleKind kind,
                    const ProgressFn& progress, int layer_index) {
  if (data.cols() == 0) throw std::invalid_argument("train_rbm: empty data");
  if (hidden_count < 1 || train_cfg.batch_size < 1 || train_cfg.epochs < 0) {
    throw std::invalid_argument("train_rbm: invalid configuration");
  }

  RbmParams params = init_rbm(rng, data.rows(), hidden_count, kind);
  const auto sample_count = static_cast<std::int32_t>(data.cols());
  const auto batch_size = static_cast<std::size_t>(train_cfg.batch_size);

  for (int epoch = 1; epoch <= train_cfg.epochs; ++epoch) {
    const auto idx = shuffled_indices(rng, sample_count);
    double epoch_error = 0.0;
    std::size_t batches = 0;
    for (std::size_t first = 0; first < idx.size(); first += batch_size) {
      const std::size_t count = std::min(batch_size, idx.size() - first);
      const Matrix batch = gather_columns(data, idx, first, count);
      epoch_error += cd_update(rng, params, batch, train_cfg);
      decay_update(params, reg_cfg, train_cfg.learning_rate);
      ++batches;
    }
    if (progress) {
      progress(LayerProgress{layer_index, epoch,
                             epoch_error / static_cast<double>(batches),
                             reserved_ratio(params.weights, 0.1)});
    }
  }
  return params;
}

DanModel train_stack(const Matrix& data, const std::vector<Index>& layer_sizes,
                     const TrainConfig& train_cfg,
                     const RegularizerConfig& reg_cfg,
                     const ProgressFn& progress) {
  if (data.cols() == 0) throw std::invalid_argument("train_stack: empty data");
  if (layer_sizes.size() < 2) {
    throw std::invalid_argument("train_stack: need at least one hidden layer");
  }
  if (layer_sizes.front() != data.rows()) {
    throw std::invalid_argument(
        "train_stack: layer_sizes[0] must equal the data dimension");
  }

  DanModel model;
  model.reg_config = reg_cfg;
  model.train_config = train_cfg;
  model.provenance.seed = train_cfg.seed;
  model.provenance.lambda = reg_cfg.lambda;
  model.provenance.gamma = reg_cfg.gamma;

  Matrix current = data;
  const Rng root(train_cfg.seed);
  for (std::size_t t = 1; t < layer_sizes.size(); ++t) {
    Rng layer_rng = root.split(t);
    RbmParams params =
        train_rbm(layer_rng, current, layer_sizes[t], train_cfg, reg_cfg,
                  VisibleKind::kBernoulli, progress, static_cast<int>(t));
    current = hidden_probabilities(params, current);  // frozen layer output
    model.layers.push_back(std::move(params));
  }
  return model;
}

Matrix extract_features(const DanModel& model, const Matrix& data,
                        Index depth) {
  if (depth < 0 || depth > static_cast<Index>(model.layers.size())) {
    throw std::invalid_argument("extract_features: depth out of range");
  }
  Matrix current = data;
  for (Index t = 0; t < depth; ++t) {
    current = hidden_probabilities(model.layers[static_cast<std::size_t>(t)],
                                   current);
  }
  return current;
}

Vector extract_features(const DanModel& model, const Vector& v, Index depth) {
  return extract_features(model, Matrix(v), depth).col(0);
}

std::vector<UnitStat> feature_sparsity_stats(const DanModel& model,
                                             const Matrix& data) {
  std::vector<UnitStat> stats;
  Matrix current = data;
  for (std::size_t t = 0; t < model.layers.size(); ++t) {
    const RbmParams& layer = model.layers[t];
    current = hidden_probabilities(layer, current);
    for (Index j = 0; j < layer.hidden_count(); ++j) {
      const double rest = sigmoid(layer.hidden_bias(j));
      UnitStat s;
      s.layer = static_cast<int>(t) + 1;
      s.unit = j;
      s.mean_activation = current.row(j).mean();
      s.mean_abs_centered = (current.row(j).array() - rest).abs().mean();
      stats.push_back(s);
    }
  }
  return stats;
}

}  // namespace dan
