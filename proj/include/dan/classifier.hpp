#pragma once

#include "dan/rng.hpp"

#include <cstdint>
#include <vector>

namespace dan {

/// Fully-connected softmax classifier: scores = weight^T f + bias.
/// Always real-valued, whatever the network feeding it looks like.
struct ClassifierHead {
  Matrix weight;  // feature_dim x class_count
  Vector bias;    // length class_count

  Index feature_dim() const { return weight.rows(); }
  Index class_count() const { return weight.cols(); }
};

struct HeadConfig {
  double learning_rate = 0.1;
  int epochs = 100;
  int batch_size = 100;
  std::uint64_t seed = 1;
};

/// Mean softmax cross-entropy of the labels under the head's scores.
double cross_entropy(const ClassifierHead& head, const Matrix& features,
                     const std::vector<int>& labels);

struct HeadGradient {
  Matrix weight;
  Vector bias;
};

/// Gradient of cross_entropy with respect to the head parameters.
HeadGradient cross_entropy_gradient(const ClassifierHead& head,
                                    const Matrix& features,
                                    const std::vector<int>& labels);

/// Mini-batch gradient descent on the softmax cross-entropy from a
/// zero-initialized head. Features are one sample per column;
/// deterministic for a fixed seed.
ClassifierHead train_head(const Matrix& features, const std::vector<int>& labels,
                          Index class_count, const HeadConfig& cfg);

/// Argmax class, ties broken by the lowest index.
int predict(const ClassifierHead& head, const Vector& feature);

/// Fraction of correct predictions. Throws std::domain_error on an empty
/// evaluation set.
double accuracy(const ClassifierHead& head, const Matrix& features,
                const std::vector<int>& labels);

}  // namespace dan
