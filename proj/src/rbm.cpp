#include "dan/rbm.hpp"

#include <cmath>
#include <stdexcept>

namespace dan {

namespace {

void check_visible_dim(const RbmParams& params, Index rows) {
  if (rows != params.visible_count()) {
    throw std::invalid_argument("visible dimension mismatch");
  }
}

void check_hidden_dim(const RbmParams& params, Index rows) {
  if (rows != params.hidden_count()) {
    throw std::invalid_argument("hidden dimension mismatch");
  }
}

Matrix sigmoid_of(Matrix x) {
  return (1.0 / (1.0 + (-x.array()).exp())).matrix();
}

// log(1 + e^x) without overflow.
double softplus(double x) { return x > 30.0 ? x : std::log1p(std::exp(x)); }

}  // namespace

void RbmParams::validate() const {
  if (hidden_bias.size() != weights.cols() ||
      visible_bias.size() != weights.rows()) {
    throw std::invalid_argument("rbm parameter dimensions inconsistent");
  }
  if (!weights.allFinite() || !hidden_bias.allFinite() ||
      !visible_bias.allFinite()) {
    throw std::invalid_argument("rbm parameters must be finite");
  }
}

RbmParams init_rbm(Rng& rng, Index visible, Index hidden, VisibleKind kind) {
  RbmParams params;
  params.weights = sample_gaussian(rng, visible, hidden, 0.0, 0.01 * 0.01);
  params.hidden_bias = Vector::Zero(hidden);
  params.visible_bias = Vector::Zero(visible);
  params.visible_kind = kind;
  return params;
}

double energy(const RbmParams& params, const Vector& visible,
              const Vector& hidden) {
  check_visible_dim(params, visible.size());
  check_hidden_dim(params, hidden.size());
  return -params.hidden_bias.dot(hidden) - params.visible_bias.dot(visible) -
         visible.dot(params.weights * hidden);
}

Matrix hidden_probabilities(const RbmParams& params, const Matrix& visible) {
  check_visible_dim(params, visible.rows());
  return sigmoid_of((params.weights.transpose() * visible).colwise() +
                    params.hidden_bias);
}

Vector hidden_probabilities(const RbmParams& params, const Vector& visible) {
  return hidden_probabilities(params, Matrix(visible)).col(0);
}

Matrix visible_field(const RbmParams& params, const Matrix& hidden) {
  check_hidden_dim(params, hidden.rows());
  Matrix field = (params.weights * hidden).colwise() + params.visible_bias;
  if (params.visible_kind == VisibleKind::kGaussian) return field;
  return sigmoid_of(std::move(field));
}

Vector visible_field(const RbmParams& params, const Vector& hidden) {
  return visible_field(params, Matrix(hidden)).col(0);
}

GibbsStep gibbs_step(Rng& rng, const RbmParams& params, const Vector& visible) {
  GibbsStep step;
  const Vector h_prob = hidden_probabilities(params, visible);
  step.hidden_sample = sample_bernoulli(rng, Matrix(h_prob)).col(0);
  step.visible_recon = visible_field(params, step.hidden_sample);
  step.hidden_recon_prob = hidden_probabilities(params, step.visible_recon);
  return step;
}

double cd_update(Rng& rng, RbmParams& params, const Matrix& batch,
                 const TrainConfig& cfg) {
  if (batch.cols() == 0) throw std::invalid_argument("cd_update: empty batch");
  check_visible_dim(params, batch.rows());
  if (cfg.cd_steps < 1) throw std::invalid_argument("cd_steps must be >= 1");

  const double inv_batch = 1.0 / static_cast<double>(batch.cols());

  const Matrix h_data = hidden_probabilities(params, batch);
  Matrix h_states = sample_bernoulli(rng, h_data);
  Matrix v_model;
  Matrix h_model;
  for (int step = 0; step < cfg.cd_steps; ++step) {
    v_model = visible_field(params, h_states);
    h_model = hidden_probabilities(params, v_model);
    if (step + 1 < cfg.cd_steps) h_states = sample_bernoulli(rng, h_model);
  }

  const double eps = cfg.learning_rate * inv_batch;
  params.weights.noalias() += eps * (batch * h_data.transpose());
  params.weights.noalias() -= eps * (v_model * h_model.transpose());
  params.hidden_bias += eps * (h_data - h_model).rowwise().sum();
  params.visible_bias += eps * (batch - v_model).rowwise().sum();

  return (batch - v_model).squaredNorm() * inv_batch;
}

double exact_log_likelihood(const RbmParams& params, const Matrix& samples) {
  if (params.visible_kind != VisibleKind::kBernoulli) {
    throw std::domain_error(
        "exact_log_likelihood requires Bernoulli visible units");
  }
  const Index n = params.visible_count();
  const Index d = params.hidden_count();
  if (n + d > 20) {
    throw std::domain_error("exact_log_likelihood: model too large to enumerate");
  }
  check_visible_dim(params, samples.rows());

  // log of the unnormalized marginal: c.v + sum_j softplus(b_j + (W^T v)_j)
  const auto log_unnormalized = [&](const Vector& v) {
    const Vector act = params.weights.transpose() * v + params.hidden_bias;
    double s = params.visible_bias.dot(v);
    for (Index j = 0; j < d; ++j) s += softplus(act(j));
    return s;
  };

  double log_z = -std::numeric_limits<double>::infinity();
  Vector v(n);
  for (std::uint64_t mask = 0; mask < (1ull << n); ++mask) {
    for (Index i = 0; i < n; ++i) v(i) = (mask >> i) & 1 ? 1.0 : 0.0;
    const double lw = log_unnormalized(v);
    // streaming log-sum-exp
    if (lw > log_z) {
      log_z = lw + std::log1p(std::exp(log_z - lw));
    } else {
      log_z += std::log1p(std::exp(lw - log_z));
    }
  }

  double total = 0.0;
  for (Index k = 0; k < samples.cols(); ++k) {
    total += log_unnormalized(samples.col(k)) - log_z;
  }
  return total;
}

}  // namespace dan
