#pragma once

#include "dan/rng.hpp"

#include <stdexcept>
#include <string>
#include <vector>

namespace dan {

enum class IoCode {
  kFileOpen,
  kBadMagic,
  kTruncated,
  kCountMismatch,
  kBadVersion,
  kBadCrc,
  kUnsupported,
};

class IoError : public std::runtime_error {
 public:
  IoError(IoCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  IoCode code() const { return code_; }

 private:
  IoCode code_;
};

/// Images as real vectors in [0, 1] (raw byte / 255), one sample per
/// column, with integer class labels.
struct Dataset {
  Matrix images;            // pixel_count x sample_count
  std::vector<int> labels;  // 0..9
  std::string source_hash;  // crc32 of the raw file payloads, hex

  Index size() const { return images.cols(); }
  Index pixel_count() const { return images.rows(); }
};

/// Load an IDX ubyte image/label file pair (big-endian dimension fields,
/// magic 0x00000803 for images and 0x00000801 for labels). Throws IoError
/// with kFileOpen / kBadMagic / kTruncated / kCountMismatch.
Dataset load_idx(const std::string& images_path, const std::string& labels_path);

/// Uniform sample of k items without replacement, deterministic per
/// generator state. Throws std::domain_error if k exceeds the dataset.
Dataset subsample(Rng& rng, const Dataset& dataset, Index k);

}  // namespace dan
