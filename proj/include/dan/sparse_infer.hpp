#pragma once

#include "dan/bitvec.hpp"
#include "dan/quantize.hpp"
#include "dan/rng.hpp"

#include <vector>

namespace dan {

/// One feedforward layer with single-bit connections: per hidden unit, a
/// positive and a negative connection mask over the visible units, plus a
/// full-precision bias. The masks are disjoint (a connection is +1, -1,
/// or absent).
struct SparseBinaryLayer {
  Index visible_count = 0;
  Index hidden_count = 0;
  std::vector<BitVector> pos_masks;  // one per hidden unit
  std::vector<BitVector> neg_masks;
  Vector bias;                       // length hidden_count

  /// Reserved in-degree of hidden unit j.
  std::size_t in_degree(Index j) const {
    const auto u = static_cast<std::size_t>(j);
    return pos_masks[u].popcount() + neg_masks[u].popcount();
  }
};

/// Pack a ternary weight matrix (entries exactly -1, 0 or +1; one column
/// per hidden unit) into bit masks. Throws std::invalid_argument on any
/// other entry value.
SparseBinaryLayer pack_layer(const Matrix& ternary, const Vector& bias);

/// Inverse of pack_layer; mostly useful for checking the packed path
/// against dense evaluation.
Matrix unpack_layer(const SparseBinaryLayer& layer);

/// Activation probabilities for a real-valued input:
/// sigmoid(sum_{i in pos_j} v_i - sum_{i in neg_j} v_i + b_j).
/// No multiplications are involved.
Vector forward_real(const SparseBinaryLayer& layer, const Vector& v);

struct BinaryForward {
  Eigen::VectorXi counts;  // popcount(v & pos_j) - popcount(v & neg_j)
  BitVector bits;          // 1 iff counts_j + b_j > 0
};

/// Popcount evaluation for a binary input vector.
BinaryForward forward_binary(const SparseBinaryLayer& layer, const BitVector& v);

enum class FeatureMode { kReal, kBinary };

/// Binarize a real vector at the given threshold (strictly greater).
BitVector binarize_input(const Vector& v, double threshold = 0.5);

/// Feed an input through a chain of packed layers. Real mode propagates
/// activation probabilities; binary mode thresholds the input at 0.5 and
/// propagates bits (returned widened to 0/1 values).
Vector run_network(const std::vector<SparseBinaryLayer>& layers,
                   const Vector& input, FeatureMode mode);

/// Pack every layer of a sign-quantized model.
std::vector<SparseBinaryLayer> pack_network(const QuantizedModel& model);

}  // namespace dan
