#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <vector>

namespace dan {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Logistic function 1/(1+exp(-x)). Saturates to 0/1 at the extremes
/// without overflowing.
double sigmoid(double x);

/// Deterministic counter-style generator (SplitMix64). The sequence is a
/// pure function of the seed, so draws are identical across platforms and
/// builds. Not shared between threads; derive per-worker generators with
/// split().
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : seed_(seed), state_(seed) {}

  std::uint64_t seed() const { return seed_; }

  std::uint64_t next_u64();

  /// Uniform draw in [0, 1) with 53 bits of precision.
  double next_unit();

  /// Uniform integer in [0, n), n > 0. Multiply-shift reduction.
  std::uint64_t next_below(std::uint64_t n);

  /// Returns 1 with probability p. Throws std::domain_error unless
  /// 0 <= p <= 1.
  bool bernoulli(double p);

  /// Draw from N(mean, variance) via Box-Muller. Consumes exactly two
  /// uniform draws. Throws std::domain_error if variance < 0.
  double gaussian(double mean, double variance);

  /// Independent child generator for stream index `stream`: seeded from
  /// this generator's seed XOR a mix of the stream index. Stable (does not
  /// depend on how many draws the parent has made).
  Rng split(std::uint64_t stream) const;

 private:
  std::uint64_t seed_;
  std::uint64_t state_;
};

/// Elementwise Bernoulli sample of a matrix of probabilities, drawn in
/// column-major order.
Matrix sample_bernoulli(Rng& rng, const Matrix& probs);

/// Matrix with i.i.d. N(mean, variance) entries, drawn in column-major order.
Matrix sample_gaussian(Rng& rng, Index rows, Index cols, double mean,
                       double variance);

/// Fisher-Yates permutation of 0..n-1.
std::vector<std::int32_t> shuffled_indices(Rng& rng, std::int32_t n);

}  // namespace dan
