#include "dan/rng.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace dan {

namespace {

std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

}  // namespace

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

std::uint64_t Rng::next_u64() {
  state_ += 0x9E3779B97F4A7C15ull;
  return mix64(state_);
}

double Rng::next_unit() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

std::uint64_t Rng::next_below(std::uint64_t n) {
  return static_cast<std::uint64_t>(
      (static_cast<unsigned __int128>(next_u64()) * n) >> 64);
}

bool Rng::bernoulli(double p) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw std::domain_error("bernoulli probability outside [0, 1]");
  }
  return next_unit() < p;
}

double Rng::gaussian(double mean, double variance) {
  if (!(variance >= 0.0)) {
    throw std::domain_error("gaussian variance must be nonnegative");
  }
  const double u1 = 1.0 - next_unit();  // (0, 1], keeps log finite
  const double u2 = next_unit();
  const double z =
      std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  return mean + std::sqrt(variance) * z;
}

Rng Rng::split(std::uint64_t stream) const {
  return Rng(seed_ ^ mix64(stream + 0x9E3779B97F4A7C15ull));
}

Matrix sample_bernoulli(Rng& rng, const Matrix& probs) {
  Matrix out(probs.rows(), probs.cols());
  for (Index j = 0; j < probs.cols(); ++j) {
    for (Index i = 0; i < probs.rows(); ++i) {
      out(i, j) = rng.bernoulli(probs(i, j)) ? 1.0 : 0.0;
    }
  }
  return out;
}

Matrix sample_gaussian(Rng& rng, Index rows, Index cols, double mean,
                       double variance) {
  Matrix out(rows, cols);
  for (Index j = 0; j < cols; ++j) {
    for (Index i = 0; i < rows; ++i) {
      out(i, j) = rng.gaussian(mean, variance);
    }
  }
  return out;
}

std::vector<std::int32_t> shuffled_indices(Rng& rng, std::int32_t n) {
  std::vector<std::int32_t> idx(static_cast<std::size_t>(n));
  for (std::int32_t i = 0; i < n; ++i) idx[static_cast<std::size_t>(i)] = i;
  for (std::int32_t i = n - 1; i > 0; --i) {
    const auto j = static_cast<std::int32_t>(
        rng.next_below(static_cast<std::uint64_t>(i) + 1));
    std::swap(idx[static_cast<std::size_t>(i)], idx[static_cast<std::size_t>(j)]);
  }
  return idx;
}

}  // namespace dan
