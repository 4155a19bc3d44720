#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "dan/stack.hpp"
#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

using namespace dan;

namespace {

// Binary patterns over the first `live` dimensions; the rest stay zero.
Matrix patterned_data(Rng& rng, Index dim, Index live, Index count) {
  Matrix data = Matrix::Zero(dim, count);
  for (Index k = 0; k < count; ++k) {
    const bool left = rng.bernoulli(0.5);
    for (Index i = 0; i < live; ++i) {
      const double base = (left == (i < live / 2)) ? 0.9 : 0.1;
      data(i, k) = rng.bernoulli(base) ? 1.0 : 0.0;
    }
  }
  return data;
}

bool same_params(const RbmParams& a, const RbmParams& b) {
  return a.weights == b.weights && a.hidden_bias == b.hidden_bias &&
         a.visible_bias == b.visible_bias;
}

}  // namespace

TEST_CASE("train_stack validates its inputs") {
  TrainConfig cfg;
  cfg.epochs = 1;
  RegularizerConfig reg;
  CHECK_THROWS_AS(train_stack(Matrix(4, 0), {4, 2}, cfg, reg),
                  std::invalid_argument);
  CHECK_THROWS_AS(train_stack(Matrix::Zero(4, 3), {5, 2}, cfg, reg),
                  std::invalid_argument);
  CHECK_THROWS_AS(train_stack(Matrix::Zero(4, 3), {4}, cfg, reg),
                  std::invalid_argument);
}

TEST_CASE("trained stack chains dimensions and stays finite") {
  Rng rng(1);
  const Matrix data = patterned_data(rng, 8, 8, 40);
  TrainConfig cfg;
  cfg.epochs = 5;
  cfg.batch_size = 10;
  cfg.seed = 11;
  RegularizerConfig reg;
  reg.kind = RegKind::kMixed;
  reg.lambda = 1e-3;

  const DanModel model = train_stack(data, {8, 6, 4}, cfg, reg);
  REQUIRE(model.layers.size() == 2);
  model.validate();
  CHECK(model.layers[0].hidden_count() == model.layers[1].visible_count());
  CHECK(model.input_dim() == 8);
  CHECK(model.feature_dim() == 4);
  CHECK(model.layers[1].visible_kind == VisibleKind::kBernoulli);
}

TEST_CASE("same seed trains bit-identical stacks") {
  Rng rng(2);
  const Matrix data = patterned_data(rng, 10, 10, 30);
  TrainConfig cfg;
  cfg.epochs = 4;
  cfg.batch_size = 8;
  cfg.seed = 77;
  RegularizerConfig reg;
  reg.kind = RegKind::kMixed;
  reg.lambda = 1e-4;

  const DanModel a = train_stack(data, {10, 7, 5}, cfg, reg);
  const DanModel b = train_stack(data, {10, 7, 5}, cfg, reg);
  REQUIRE(a.layers.size() == b.layers.size());
  for (std::size_t t = 0; t < a.layers.size(); ++t) {
    CHECK(same_params(a.layers[t], b.layers[t]));
  }
}

TEST_CASE("a one-hidden-layer stack equals direct layer training") {
  Rng rng(3);
  const Matrix data = patterned_data(rng, 6, 6, 8);
  TrainConfig cfg;
  cfg.epochs = 10;
  cfg.batch_size = 4;
  cfg.seed = 5;
  RegularizerConfig reg;

  const DanModel stack = train_stack(data, {6, 3}, cfg, reg);

  Rng layer_rng = Rng(cfg.seed).split(1);
  const RbmParams direct = train_rbm(layer_rng, data, 3, cfg, reg);
  REQUIRE(stack.layers.size() == 1);
  CHECK(same_params(stack.layers[0], direct));
}

TEST_CASE("no-decay training is exactly plain CD training") {
  // Replays the documented schedule (per-epoch reshuffle, CD per batch)
  // without ever touching the regularizer; kind none must match bit for
  // bit.
  Rng rng(4);
  const Matrix data = patterned_data(rng, 9, 9, 24);
  TrainConfig cfg;
  cfg.epochs = 6;
  cfg.batch_size = 7;  // exercises a ragged final batch
  cfg.seed = 123;
  RegularizerConfig none;

  const DanModel stack = train_stack(data, {9, 5}, cfg, none);

  Rng ref_rng = Rng(cfg.seed).split(1);
  RbmParams ref = init_rbm(ref_rng, 9, 5);
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    const auto idx =
        shuffled_indices(ref_rng, static_cast<std::int32_t>(data.cols()));
    for (std::size_t first = 0; first < idx.size();
         first += static_cast<std::size_t>(cfg.batch_size)) {
      const std::size_t count = std::min(
          static_cast<std::size_t>(cfg.batch_size), idx.size() - first);
      Matrix batch(data.rows(), static_cast<Index>(count));
      for (std::size_t k = 0; k < count; ++k) {
        batch.col(static_cast<Index>(k)) = data.col(idx[first + k]);
      }
      cd_update(ref_rng, ref, batch, cfg);
    }
  }
  REQUIRE(stack.layers.size() == 1);
  CHECK(same_params(stack.layers[0], ref));
}

TEST_CASE("extract_features: identity at depth 0, 0.5 for a zero model") {
  DanModel model;
  for (int t = 0; t < 2; ++t) {
    RbmParams layer;
    layer.weights = Matrix::Zero(4, 4);
    layer.hidden_bias = Vector::Zero(4);
    layer.visible_bias = Vector::Zero(4);
    model.layers.push_back(layer);
  }
  Rng rng(6);
  const Matrix data = oracles::random_matrix(rng, 4, 5, 1.0);

  CHECK(extract_features(model, data, 0) == data);
  CHECK((extract_features(model, data, 1).array() == 0.5).all());
  CHECK((extract_features(model, data, 2).array() == 0.5).all());
  CHECK_THROWS_AS(extract_features(model, data, 3), std::invalid_argument);
}

TEST_CASE("a zero weight column yields a constant feature") {
  Rng rng(7);
  DanModel model;
  RbmParams layer;
  layer.weights = oracles::random_matrix(rng, 5, 3, 1.0);
  layer.weights.col(1).setZero();
  layer.hidden_bias = oracles::random_vector(rng, 3, 1.0);
  layer.visible_bias = Vector::Zero(5);
  model.layers.push_back(layer);

  const double constant = sigmoid(layer.hidden_bias(1));
  for (int trial = 0; trial < 50; ++trial) {
    const Vector v = oracles::random_vector(rng, 5, 1.0);
    CHECK(extract_features(model, v, 1)(1) == constant);
  }
}

TEST_CASE("feature_sparsity_stats: shapes and the zero-weight case") {
  DanModel model;
  RbmParams a;
  a.weights = Matrix::Zero(6, 4);
  a.hidden_bias = Vector::Constant(4, 0.3);
  a.visible_bias = Vector::Zero(6);
  RbmParams b;
  b.weights = Matrix::Zero(4, 3);
  b.hidden_bias = Vector::Zero(3);
  b.visible_bias = Vector::Zero(4);
  model.layers = {a, b};

  Rng rng(8);
  const Matrix data = oracles::random_matrix(rng, 6, 10, 1.0);
  const auto stats = feature_sparsity_stats(model, data);
  REQUIRE(stats.size() == 4 + 3);  // one row per hidden unit, all layers
  for (const UnitStat& s : stats) {
    CHECK(s.mean_abs_centered == 0.0);  // zero weights: exactly constant
    const double expected = s.layer == 1 ? sigmoid(0.3) : 0.5;
    CHECK(s.mean_activation == doctest::Approx(expected));
  }
}

TEST_CASE("mixed decay concentrates units at their rest activation") {
  // Wide hidden layer over narrow data: the decay should park the unused
  // units at sigmoid(b_j) exactly, which plain CD training does not.
  Rng rng(9);
  const Matrix data = patterned_data(rng, 16, 8, 64);
  TrainConfig cfg;
  cfg.epochs = 2000;
  cfg.batch_size = 16;
  cfg.seed = 31;

  RegularizerConfig none;
  RegularizerConfig mixed;
  mixed.kind = RegKind::kMixed;
  mixed.lambda = 5e-2;  // strong decay; this tiny task has a loud signal
  mixed.gamma = 0.5;

  const DanModel dbn = train_stack(data, {16, 16}, cfg, none);
  const DanModel dan = train_stack(data, {16, 16}, cfg, mixed);

  const auto near_constant_fraction = [&](const DanModel& model) {
    const auto stats = feature_sparsity_stats(model, data);
    int hits = 0;
    for (const UnitStat& s : stats) {
      if (s.mean_abs_centered < 0.01) ++hits;
    }
    return static_cast<double>(hits) / static_cast<double>(stats.size());
  };

  CHECK(near_constant_fraction(dan) > near_constant_fraction(dbn));
}
