#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "dan/classifier.hpp"
#include "oracles.hpp"

#include <cmath>
#include <vector>

using namespace dan;

namespace {

// Two well-separated 2-D clusters.
void separable_clusters(Rng& rng, Index count, Matrix* features,
                        std::vector<int>* labels) {
  features->resize(2, count);
  labels->resize(static_cast<std::size_t>(count));
  for (Index k = 0; k < count; ++k) {
    const int label = rng.bernoulli(0.5) ? 1 : 0;
    const double cx = label == 0 ? -2.0 : 2.0;
    (*features)(0, k) = cx + rng.gaussian(0.0, 0.2);
    (*features)(1, k) = rng.gaussian(0.0, 0.2);
    (*labels)[static_cast<std::size_t>(k)] = label;
  }
}

}  // namespace

TEST_CASE("predict: zero head falls back to the lowest class") {
  ClassifierHead head;
  head.weight = Matrix::Zero(3, 4);
  head.bias = Vector::Zero(4);
  CHECK(predict(head, Vector::Ones(3)) == 0);
}

TEST_CASE("predict: scaled one-hot columns select the max feature") {
  ClassifierHead head;
  head.weight = 3.0 * Matrix::Identity(4, 4);
  head.bias = Vector::Zero(4);
  Vector f(4);
  f << 0.1, 0.9, 0.3, 0.2;
  CHECK(predict(head, f) == 1);
}

TEST_CASE("predict matches a naive per-class score loop") {
  Rng rng(1);
  for (int trial = 0; trial < 200; ++trial) {
    ClassifierHead head;
    head.weight = oracles::random_matrix(rng, 5, 7, 1.0);
    head.bias = oracles::random_vector(rng, 7, 1.0);
    const Vector f = oracles::random_vector(rng, 5, 1.0);

    int best = 0;
    double best_score = -1e300;
    for (int c = 0; c < 7; ++c) {
      double score = head.bias(c);
      for (Index i = 0; i < 5; ++i) score += head.weight(i, c) * f(i);
      if (score > best_score) {
        best_score = score;
        best = c;
      }
    }
    CHECK(predict(head, f) == best);
  }
}

TEST_CASE("predict rejects mismatched dimensions") {
  ClassifierHead head;
  head.weight = Matrix::Zero(3, 2);
  head.bias = Vector::Zero(2);
  CHECK_THROWS_AS(predict(head, Vector::Zero(4)), std::invalid_argument);
}

TEST_CASE("cross-entropy gradient matches finite differences") {
  Rng rng(2);
  const double step = 1e-6;
  for (int trial = 0; trial < 25; ++trial) {
    ClassifierHead head;
    head.weight = oracles::random_matrix(rng, 4, 3, 0.5);
    head.bias = oracles::random_vector(rng, 3, 0.5);
    const Matrix features = oracles::random_matrix(rng, 4, 6, 1.0);
    std::vector<int> labels(6);
    for (auto& label : labels) {
      label = static_cast<int>(rng.next_below(3));
    }

    const HeadGradient grad = cross_entropy_gradient(head, features, labels);

    Matrix numeric_w(4, 3);
    for (Index i = 0; i < 4; ++i) {
      for (Index j = 0; j < 3; ++j) {
        ClassifierHead plus = head, minus = head;
        plus.weight(i, j) += step;
        minus.weight(i, j) -= step;
        numeric_w(i, j) = (cross_entropy(plus, features, labels) -
                           cross_entropy(minus, features, labels)) /
                          (2 * step);
      }
    }
    CHECK((grad.weight - numeric_w).norm() / numeric_w.norm() < 1e-5);

    Vector numeric_b(3);
    for (Index j = 0; j < 3; ++j) {
      ClassifierHead plus = head, minus = head;
      plus.bias(j) += step;
      minus.bias(j) -= step;
      numeric_b(j) = (cross_entropy(plus, features, labels) -
                      cross_entropy(minus, features, labels)) /
                     (2 * step);
    }
    CHECK((grad.bias - numeric_b).norm() / numeric_b.norm() < 1e-5);
  }
}

TEST_CASE("full-batch loss decreases monotonically") {
  Rng rng(3);
  Matrix features;
  std::vector<int> labels;
  separable_clusters(rng, 64, &features, &labels);

  ClassifierHead head;
  head.weight = Matrix::Zero(2, 2);
  head.bias = Vector::Zero(2);
  double prev = cross_entropy(head, features, labels);
  for (int epoch = 0; epoch < 50; ++epoch) {
    const HeadGradient grad = cross_entropy_gradient(head, features, labels);
    head.weight -= 0.5 * grad.weight;
    head.bias -= 0.5 * grad.bias;
    const double now = cross_entropy(head, features, labels);
    CHECK(now < prev);
    prev = now;
  }
}

TEST_CASE("separable clusters train to full accuracy") {
  Rng rng(4);
  Matrix features;
  std::vector<int> labels;
  separable_clusters(rng, 200, &features, &labels);

  HeadConfig cfg;
  cfg.seed = 9;
  const ClassifierHead head = train_head(features, labels, 2, cfg);
  CHECK(accuracy(head, features, labels) == 1.0);
}

TEST_CASE("a single present class is always predicted") {
  Rng rng(5);
  const Matrix features = oracles::random_matrix(rng, 3, 40, 1.0);
  const std::vector<int> labels(40, 6);
  HeadConfig cfg;
  cfg.seed = 10;
  const ClassifierHead head = train_head(features, labels, 10, cfg);
  for (Index k = 0; k < features.cols(); ++k) {
    CHECK(predict(head, features.col(k)) == 6);
  }
}

TEST_CASE("training is deterministic per seed") {
  Rng rng(6);
  Matrix features;
  std::vector<int> labels;
  separable_clusters(rng, 120, &features, &labels);
  HeadConfig cfg;
  cfg.seed = 321;
  const ClassifierHead a = train_head(features, labels, 2, cfg);
  const ClassifierHead b = train_head(features, labels, 2, cfg);
  CHECK(a.weight == b.weight);
  CHECK(a.bias == b.bias);
}

TEST_CASE("train_head validates inputs") {
  HeadConfig cfg;
  CHECK_THROWS_AS(train_head(Matrix(3, 0), {}, 2, cfg), std::invalid_argument);
  CHECK_THROWS_AS(train_head(Matrix::Zero(3, 2), {0, 5}, 2, cfg),
                  std::invalid_argument);
}

TEST_CASE("accuracy counts exact matches and rejects empty sets") {
  ClassifierHead head;
  head.weight = Matrix::Identity(3, 3);
  head.bias = Vector::Zero(3);
  Matrix features(3, 3);
  features << 1, 0, 0,
              0, 1, 0,
              0, 0, 1;
  CHECK(accuracy(head, features, {0, 1, 2}) == 1.0);
  CHECK(accuracy(head, features, {0, 1, 0}) == doctest::Approx(2.0 / 3.0));
  CHECK_THROWS_AS(accuracy(head, Matrix(3, 0), {}), std::domain_error);
}

TEST_CASE("accuracy is invariant under positive score rescaling") {
  Rng rng(7);
  ClassifierHead head;
  head.weight = oracles::random_matrix(rng, 4, 5, 1.0);
  head.bias = oracles::random_vector(rng, 5, 1.0);
  const Matrix features = oracles::random_matrix(rng, 4, 30, 1.0);
  std::vector<int> labels(30);
  for (auto& label : labels) {
    label = static_cast<int>(rng.next_below(5));
  }

  ClassifierHead scaled;
  scaled.weight = 7.5 * head.weight;
  scaled.bias = 7.5 * head.bias;
  CHECK(accuracy(head, features, labels) ==
        accuracy(scaled, features, labels));
}
