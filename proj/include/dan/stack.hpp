#pragma once

#include "dan/rbm.hpp"
#include "dan/regularizer.hpp"
#include "dan/rng.hpp"

#include <functional>
#include <string>
#include <vector>

namespace dan {

/// Free-form training provenance carried by a trained model.
struct Provenance {
  std::string dataset_hash;
  std::uint64_t seed = 0;
  double lambda = 0.0;
  double gamma = 0.5;
};

/// A greedy layer-wise trained stack of RBMs. With a mixed-norm decay this
/// is a deep adaptive network; with no decay it is a plain deep belief
/// network. Adjacent layers chain: layer[t].hidden_count ==
/// layer[t+1].visible_count.
struct DanModel {
  std::vector<RbmParams> layers;
  RegularizerConfig reg_config;
  TrainConfig train_config;
  Provenance provenance;

  Index input_dim() const {
    return layers.empty() ? 0 : layers.front().visible_count();
  }
  Index feature_dim() const {
    return layers.empty() ? 0 : layers.back().hidden_count();
  }
  void validate() const;
};

struct LayerProgress {
  int layer = 0;  // 1-based
  int epoch = 0;  // 1-based
  double reconstruction_error = 0.0;
  double sigma_at_0_1 = 0.0;  // reserved-weight ratio at threshold 0.1
};

using ProgressFn = std::function<void(const LayerProgress&)>;

/// Train one RBM layer: per mini-batch, a CD update followed by one decay
/// step. Mini-batch order is reshuffled each epoch from `rng`.
RbmParams train_rbm(Rng& rng, const Matrix& data, Index hidden_count,
                    const TrainConfig& train_cfg,
                    const RegularizerConfig& reg_cfg,
                    VisibleKind kind = VisibleKind::kBernoulli,
                    const ProgressFn& progress = {}, int layer_index = 1);

/// Greedy layer-wise training. layer_sizes[0] must equal the data
/// dimension; each further entry adds a hidden layer trained on the
/// previous layer's activation probabilities. Layer t trains with the
/// child generator Rng(train_cfg.seed).split(t).
DanModel train_stack(const Matrix& data, const std::vector<Index>& layer_sizes,
                     const TrainConfig& train_cfg,
                     const RegularizerConfig& reg_cfg,
                     const ProgressFn& progress = {});

/// Feedforward activation probabilities after `depth` layers (depth 0
/// returns the input unchanged). Probabilities propagate; nothing is
/// sampled. One sample per column.
Matrix extract_features(const DanModel& model, const Matrix& data, Index depth);
Vector extract_features(const DanModel& model, const Vector& v, Index depth);

struct UnitStat {
  int layer = 0;  // 1-based
  Index unit = 0;
  double mean_activation = 0.0;
  // mean |activation - sigmoid(bias)|: distance from the constant output
  // the unit would produce with a zero weight column
  double mean_abs_centered = 0.0;
};

/// Per-hidden-unit activation statistics over a dataset, for every layer.
std::vector<UnitStat> feature_sparsity_stats(const DanModel& model,
                                             const Matrix& data);

}  // namespace dan
