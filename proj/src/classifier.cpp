#include "dan/classifier.hpp"

#include <cmath>
#include <stdexcept>

namespace dan {

namespace {

void check_inputs(const Matrix& features, const std::vector<int>& labels,
                  Index class_count) {
  if (static_cast<std::size_t>(features.cols()) != labels.size()) {
    throw std::invalid_argument("features and labels must have equal length");
  }
  for (int label : labels) {
    if (label < 0 || label >= class_count) {
      throw std::invalid_argument("label outside [0, class_count)");
    }
  }
}

// Column-wise softmax of the scores, computed stably.
Matrix softmax(Matrix scores) {
  for (Index k = 0; k < scores.cols(); ++k) {
    auto col = scores.col(k).array();
    col -= col.maxCoeff();
    col = col.exp();
    col /= col.sum();
  }
  return scores;
}

}  // namespace

double cross_entropy(const ClassifierHead& head, const Matrix& features,
                     const std::vector<int>& labels) {
  check_inputs(features, labels, head.class_count());
  const Matrix probs =
      softmax((head.weight.transpose() * features).colwise() + head.bias);
  double loss = 0.0;
  for (Index k = 0; k < features.cols(); ++k) {
    loss -= std::log(probs(labels[static_cast<std::size_t>(k)], k));
  }
  return loss / static_cast<double>(features.cols());
}

HeadGradient cross_entropy_gradient(const ClassifierHead& head,
                                    const Matrix& features,
                                    const std::vector<int>& labels) {
  check_inputs(features, labels, head.class_count());
  Matrix delta =
      softmax((head.weight.transpose() * features).colwise() + head.bias);
  for (Index k = 0; k < features.cols(); ++k) {
    delta(labels[static_cast<std::size_t>(k)], k) -= 1.0;
  }
  const double inv_n = 1.0 / static_cast<double>(features.cols());
  HeadGradient grad;
  grad.weight = inv_n * (features * delta.transpose());
  grad.bias = inv_n * delta.rowwise().sum();
  return grad;
}

ClassifierHead train_head(const Matrix& features, const std::vector<int>& labels,
                          Index class_count, const HeadConfig& cfg) {
  if (features.cols() == 0) throw std::invalid_argument("train_head: empty data");
  check_inputs(features, labels, class_count);

  ClassifierHead head;
  head.weight = Matrix::Zero(features.rows(), class_count);
  head.bias = Vector::Zero(class_count);

  Rng rng(cfg.seed);
  const auto batch_size = static_cast<std::size_t>(cfg.batch_size);
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    const auto idx =
        shuffled_indices(rng, static_cast<std::int32_t>(features.cols()));
    for (std::size_t first = 0; first < idx.size(); first += batch_size) {
      const std::size_t count = std::min(batch_size, idx.size() - first);
      Matrix batch(features.rows(), static_cast<Index>(count));
      std::vector<int> batch_labels(count);
      for (std::size_t k = 0; k < count; ++k) {
        batch.col(static_cast<Index>(k)) = features.col(idx[first + k]);
        batch_labels[k] = labels[static_cast<std::size_t>(idx[first + k])];
      }
      const HeadGradient grad = cross_entropy_gradient(head, batch, batch_labels);
      head.weight -= cfg.learning_rate * grad.weight;
      head.bias -= cfg.learning_rate * grad.bias;
    }
  }
  return head;
}

int predict(const ClassifierHead& head, const Vector& feature) {
  if (feature.size() != head.feature_dim()) {
    throw std::invalid_argument("predict: feature dimension mismatch");
  }
  const Vector scores = head.weight.transpose() * feature + head.bias;
  int best = 0;
  for (Index c = 1; c < scores.size(); ++c) {
    if (scores(c) > scores(best)) best = static_cast<int>(c);
  }
  return best;
}

double accuracy(const ClassifierHead& head, const Matrix& features,
                const std::vector<int>& labels) {
  if (features.cols() == 0) {
    throw std::domain_error("accuracy: empty evaluation set");
  }
  if (static_cast<std::size_t>(features.cols()) != labels.size()) {
    throw std::invalid_argument("features and labels must have equal length");
  }
  Index correct = 0;
  for (Index k = 0; k < features.cols(); ++k) {
    if (predict(head, features.col(k)) == labels[static_cast<std::size_t>(k)]) {
      ++correct;
    }
  }
  return static_cast<double>(correct) / static_cast<double>(features.cols());
}

}  // namespace dan
