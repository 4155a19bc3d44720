#pragma once

#include "dan/rng.hpp"

#include <cstdint>

namespace dan {

enum class VisibleKind { kBernoulli, kGaussian };

/// Parameters of one restricted Boltzmann machine layer. W(i, j) is the
/// connection between visible unit i and hidden unit j.
struct RbmParams {
  Matrix weights;       // visible_count x hidden_count
  Vector hidden_bias;   // length hidden_count
  Vector visible_bias;  // length visible_count
  VisibleKind visible_kind = VisibleKind::kBernoulli;

  Index visible_count() const { return weights.rows(); }
  Index hidden_count() const { return weights.cols(); }

  /// Throws std::invalid_argument if the bias lengths do not match the
  /// weight matrix or any parameter is non-finite.
  void validate() const;
};

struct TrainConfig {
  double learning_rate = 0.05;
  int epochs = 50;
  int batch_size = 100;
  int cd_steps = 1;
  std::uint64_t seed = 1;
};

/// Small-normal weight init (sd 0.01), zero biases.
RbmParams init_rbm(Rng& rng, Index visible, Index hidden,
                   VisibleKind kind = VisibleKind::kBernoulli);

/// Energy of a joint configuration: -b.h - c.v - v.W.h.
double energy(const RbmParams& params, const Vector& visible,
              const Vector& hidden);

/// P(h_j = 1 | v) for each column of `visible` (one sample per column).
Matrix hidden_probabilities(const RbmParams& params, const Matrix& visible);
Vector hidden_probabilities(const RbmParams& params, const Vector& visible);

/// Conditional parameters of the visible units given hidden states:
/// Bernoulli kind returns activation probabilities, Gaussian kind returns
/// the means of unit-variance Gaussians.
Matrix visible_field(const RbmParams& params, const Matrix& hidden);
Vector visible_field(const RbmParams& params, const Vector& hidden);

struct GibbsStep {
  Vector hidden_sample;      // binary
  Vector visible_recon;      // probabilities (Bernoulli) or means (Gaussian)
  Vector hidden_recon_prob;  // P(h=1 | visible_recon)
};

/// One sampling sweep from a visible vector: sample h, reconstruct the
/// visible field (mean-field, no visible sampling), recompute hidden
/// probabilities from the reconstruction.
GibbsStep gibbs_step(Rng& rng, const RbmParams& params, const Vector& visible);

/// Contrastive-divergence update (CD-k) over a batch of visible samples
/// (one per column), applied in place. Data-side hidden statistics use
/// probabilities; the model side runs cd_steps sampling iterations with
/// mean-field visible reconstructions. Returns the mean squared
/// reconstruction error per sample of the batch.
///
/// Throws std::invalid_argument on an empty batch or dimension mismatch.
double cd_update(Rng& rng, RbmParams& params, const Matrix& batch,
                 const TrainConfig& cfg);

/// Exact log-likelihood of binary samples (one per column) with the
/// partition function computed by enumerating all visible configurations.
/// Bernoulli visible kind only; requires visible + hidden <= 20 units and
/// throws std::domain_error beyond that guard.
double exact_log_likelihood(const RbmParams& params, const Matrix& samples);

}  // namespace dan
