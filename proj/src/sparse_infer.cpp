#include "dan/sparse_infer.hpp"

#include <stdexcept>

namespace dan {

SparseBinaryLayer pack_layer(const Matrix& ternary, const Vector& bias) {
  if (bias.size() != ternary.cols()) {
    throw std::invalid_argument("pack_layer: bias length must match columns");
  }
  SparseBinaryLayer layer;
  layer.visible_count = ternary.rows();
  layer.hidden_count = ternary.cols();
  layer.bias = bias;
  layer.pos_masks.reserve(static_cast<std::size_t>(ternary.cols()));
  layer.neg_masks.reserve(static_cast<std::size_t>(ternary.cols()));
  for (Index j = 0; j < ternary.cols(); ++j) {
    BitVector pos(static_cast<std::size_t>(ternary.rows()));
    BitVector neg(static_cast<std::size_t>(ternary.rows()));
    for (Index i = 0; i < ternary.rows(); ++i) {
      const double w = ternary(i, j);
      if (w == 1.0) {
        pos.set(static_cast<std::size_t>(i));
      } else if (w == -1.0) {
        neg.set(static_cast<std::size_t>(i));
      } else if (w != 0.0) {
        throw std::invalid_argument("pack_layer: entries must be -1, 0 or +1");
      }
    }
    layer.pos_masks.push_back(std::move(pos));
    layer.neg_masks.push_back(std::move(neg));
  }
  return layer;
}

Matrix unpack_layer(const SparseBinaryLayer& layer) {
  Matrix w = Matrix::Zero(layer.visible_count, layer.hidden_count);
  for (Index j = 0; j < layer.hidden_count; ++j) {
    const auto u = static_cast<std::size_t>(j);
    for (Index i = 0; i < layer.visible_count; ++i) {
      if (layer.pos_masks[u].test(static_cast<std::size_t>(i))) w(i, j) = 1.0;
      if (layer.neg_masks[u].test(static_cast<std::size_t>(i))) w(i, j) = -1.0;
    }
  }
  return w;
}

namespace {

// Accumulate v over the set bits of the mask.
double masked_sum(const BitVector& mask, const Vector& v) {
  double total = 0.0;
  for (std::size_t k = 0; k < mask.word_count(); ++k) {
    std::uint64_t word = mask.words()[k];
    while (word) {
      const int bit = std::countr_zero(word);
      total += v(static_cast<Index>(k * 64 + static_cast<std::size_t>(bit)));
      word &= word - 1;
    }
  }
  return total;
}

}  // namespace

Vector forward_real(const SparseBinaryLayer& layer, const Vector& v) {
  if (v.size() != layer.visible_count) {
    throw std::invalid_argument("forward_real: input length mismatch");
  }
  Vector out(layer.hidden_count);
  for (Index j = 0; j < layer.hidden_count; ++j) {
    const auto u = static_cast<std::size_t>(j);
    const double z = masked_sum(layer.pos_masks[u], v) -
                     masked_sum(layer.neg_masks[u], v) + layer.bias(j);
    out(j) = sigmoid(z);
  }
  return out;
}

BinaryForward forward_binary(const SparseBinaryLayer& layer,
                             const BitVector& v) {
  if (v.size() != static_cast<std::size_t>(layer.visible_count)) {
    throw std::invalid_argument("forward_binary: input length mismatch");
  }
  BinaryForward result;
  result.counts.resize(layer.hidden_count);
  result.bits = BitVector(static_cast<std::size_t>(layer.hidden_count));
  for (Index j = 0; j < layer.hidden_count; ++j) {
    const auto u = static_cast<std::size_t>(j);
    const auto z = static_cast<int>(and_popcount(v, layer.pos_masks[u])) -
                   static_cast<int>(and_popcount(v, layer.neg_masks[u]));
    result.counts(j) = z;
    // sigmoid(z + b) > 0.5 exactly when z + b > 0; ties resolve to 0
    if (static_cast<double>(z) + layer.bias(j) > 0.0) {
      result.bits.set(static_cast<std::size_t>(j));
    }
  }
  return result;
}

BitVector binarize_input(const Vector& v, double threshold) {
  BitVector bits(static_cast<std::size_t>(v.size()));
  for (Index i = 0; i < v.size(); ++i) {
    if (v(i) > threshold) bits.set(static_cast<std::size_t>(i));
  }
  return bits;
}

Vector run_network(const std::vector<SparseBinaryLayer>& layers,
                   const Vector& input, FeatureMode mode) {
  if (mode == FeatureMode::kReal) {
    Vector current = input;
    for (const SparseBinaryLayer& layer : layers) {
      current = forward_real(layer, current);
    }
    return current;
  }
  BitVector bits = binarize_input(input);
  for (const SparseBinaryLayer& layer : layers) {
    bits = forward_binary(layer, bits).bits;
  }
  Vector out(static_cast<Index>(bits.size()));
  for (Index i = 0; i < out.size(); ++i) {
    out(i) = bits.test(static_cast<std::size_t>(i)) ? 1.0 : 0.0;
  }
  return out;
}

std::vector<SparseBinaryLayer> pack_network(const QuantizedModel& model) {
  if (model.mode == QuantMode::kSparseReal) {
    throw std::invalid_argument("pack_network: model is not sign-quantized");
  }
  std::vector<SparseBinaryLayer> layers;
  for (std::size_t l = 0; l < model.weights.size(); ++l) {
    layers.push_back(pack_layer(model.weights[l], model.hidden_biases[l]));
  }
  return layers;
}

}  // namespace dan
