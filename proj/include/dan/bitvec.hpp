#pragma once

#include <bit>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace dan {

/// Fixed-length bit vector packed into 64-bit words, LSB first. Bits past
/// `size()` in the last word are kept zero so whole-word popcounts are
/// exact.
class BitVector {
 public:
  BitVector() = default;
  explicit BitVector(std::size_t size)
      : size_(size), words_((size + 63) / 64, 0) {}

  std::size_t size() const { return size_; }
  std::size_t word_count() const { return words_.size(); }
  const std::uint64_t* words() const { return words_.data(); }

  bool test(std::size_t i) const {
    return (words_[i / 64] >> (i % 64)) & 1u;
  }

  void set(std::size_t i, bool value = true) {
    if (i >= size_) throw std::out_of_range("BitVector::set: index out of range");
    const std::uint64_t bit = 1ull << (i % 64);
    if (value) {
      words_[i / 64] |= bit;
    } else {
      words_[i / 64] &= ~bit;
    }
  }

  std::size_t popcount() const {
    std::size_t total = 0;
    for (std::uint64_t w : words_) total += static_cast<std::size_t>(std::popcount(w));
    return total;
  }

  bool operator==(const BitVector& other) const {
    return size_ == other.size_ && words_ == other.words_;
  }

 private:
  std::size_t size_ = 0;
  std::vector<std::uint64_t> words_;
};

/// popcount(a AND b). Lengths must match.
inline std::size_t and_popcount(const BitVector& a, const BitVector& b) {
  if (a.size() != b.size()) {
    throw std::invalid_argument("and_popcount: length mismatch");
  }
  std::size_t total = 0;
  for (std::size_t k = 0; k < a.word_count(); ++k) {
    total += static_cast<std::size_t>(std::popcount(a.words()[k] & b.words()[k]));
  }
  return total;
}

}  // namespace dan
