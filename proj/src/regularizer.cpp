#include "dan/regularizer.hpp"

namespace dan {

double mixed_norm(const Matrix& w) { return w.rowwise().norm().sum(); }

double l1_norm(const Matrix& w) { return w.array().abs().sum(); }

double l2_norm(const Matrix& w) { return w.norm(); }

double reg_value(const Matrix& w, const RegularizerConfig& cfg) {
  switch (cfg.kind) {
    case RegKind::kNone:
      return 0.0;
    case RegKind::kMixed:
      return cfg.lambda * (cfg.gamma * w.colwise().norm().sum() +
                           (1.0 - cfg.gamma) * w.rowwise().norm().sum());
    case RegKind::kL1:
      return cfg.lambda * l1_norm(w);
    case RegKind::kL2: {
      const double n = l2_norm(w);
      return cfg.lambda * n * n;
    }
  }
  return 0.0;
}

Matrix reg_gradient(const Matrix& w, const RegularizerConfig& cfg) {
  switch (cfg.kind) {
    case RegKind::kNone:
      return Matrix::Zero(w.rows(), w.cols());
    case RegKind::kMixed: {
      const Eigen::ArrayXd row_norms =
          w.rowwise().norm().array().max(cfg.eps_norm);
      const Eigen::ArrayXd col_norms =
          w.colwise().norm().transpose().array().max(cfg.eps_norm);
      Matrix grad =
          cfg.gamma * (w.array().rowwise() / col_norms.transpose()).matrix();
      grad += (1.0 - cfg.gamma) * (w.array().colwise() / row_norms).matrix();
      return cfg.lambda * grad;
    }
    case RegKind::kL1:
      return cfg.lambda * w.array().sign().matrix();
    case RegKind::kL2:
      return 2.0 * cfg.lambda * w;
  }
  return Matrix::Zero(w.rows(), w.cols());
}

void decay_update(RbmParams& params, const RegularizerConfig& cfg, double eps) {
  if (cfg.kind == RegKind::kNone || cfg.lambda == 0.0) return;
  const Matrix grad = reg_gradient(params.weights, cfg);
  Matrix updated = params.weights - eps * grad;
  // Proximal-style clamp: a step may shrink a weight to zero but never
  // push it through.
  updated = (updated.array() * params.weights.array() < 0.0)
                .select(Matrix::Zero(updated.rows(), updated.cols()), updated);
  params.weights = std::move(updated);
}

}  // namespace dan
