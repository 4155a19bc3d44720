#pragma once

#include "dan/rbm.hpp"
#include "dan/rng.hpp"

namespace dan {

enum class RegKind { kNone, kMixed, kL1, kL2 };

/// Weight-decay configuration. `lambda` scales the penalty; for the mixed
/// kind, `gamma` balances column-group sparsity (gamma = 1 penalizes the
/// sum of column norms) against row-group sparsity (gamma = 0 penalizes
/// the sum of row norms). gamma is ignored for L1/L2. `eps_norm` guards
/// the group-norm denominators in the gradient.
struct RegularizerConfig {
  RegKind kind = RegKind::kNone;
  double lambda = 0.0;
  double gamma = 0.5;
  double eps_norm = 1e-8;
};

/// Sum of the Euclidean norms of the rows of W.
double mixed_norm(const Matrix& w);

/// Sum of absolute values of all entries.
double l1_norm(const Matrix& w);

/// Euclidean (Frobenius) norm of all entries.
double l2_norm(const Matrix& w);

/// Penalty value:
///   mixed: lambda * (gamma * mixed_norm(W^T) + (1-gamma) * mixed_norm(W))
///   l1:    lambda * l1_norm(W)
///   l2:    lambda * l2_norm(W)^2   (classic squared weight decay)
///   none:  0
double reg_value(const Matrix& w, const RegularizerConfig& cfg);

/// Analytical gradient of reg_value with the group norms in the mixed-kind
/// denominators clamped below by eps_norm. Zero entries get zero gradient.
Matrix reg_gradient(const Matrix& w, const RegularizerConfig& cfg);

/// One decay step: W <- W - eps * reg_gradient(W). Entries whose sign
/// would flip are clamped to exactly zero, and biases are left untouched.
void decay_update(RbmParams& params, const RegularizerConfig& cfg, double eps);

}  // namespace dan
