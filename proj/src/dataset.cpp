#include "dan/dataset.hpp"

#include "dan/model_io.hpp"

#include <cstdio>
#include <fstream>

namespace dan {

namespace {

std::vector<std::uint8_t> read_all(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(IoCode::kFileOpen, "cannot open " + path);
  return std::vector<std::uint8_t>(std::istreambuf_iterator<char>(in),
                                   std::istreambuf_iterator<char>());
}

std::uint32_t read_be32(const std::vector<std::uint8_t>& bytes,
                        std::size_t offset, const std::string& path) {
  if (offset + 4 > bytes.size()) {
    throw IoError(IoCode::kTruncated, path + ": truncated header");
  }
  return (static_cast<std::uint32_t>(bytes[offset]) << 24) |
         (static_cast<std::uint32_t>(bytes[offset + 1]) << 16) |
         (static_cast<std::uint32_t>(bytes[offset + 2]) << 8) |
         static_cast<std::uint32_t>(bytes[offset + 3]);
}

}  // namespace

Dataset load_idx(const std::string& images_path,
                 const std::string& labels_path) {
  const auto image_bytes = read_all(images_path);
  const auto label_bytes = read_all(labels_path);

  if (read_be32(image_bytes, 0, images_path) != 0x00000803u) {
    throw IoError(IoCode::kBadMagic, images_path + ": not an IDX image file");
  }
  if (read_be32(label_bytes, 0, labels_path) != 0x00000801u) {
    throw IoError(IoCode::kBadMagic, labels_path + ": not an IDX label file");
  }

  const std::uint32_t image_count = read_be32(image_bytes, 4, images_path);
  const std::uint32_t rows = read_be32(image_bytes, 8, images_path);
  const std::uint32_t cols = read_be32(image_bytes, 12, images_path);
  const std::uint32_t label_count = read_be32(label_bytes, 4, labels_path);

  if (image_count != label_count) {
    throw IoError(IoCode::kCountMismatch,
                  images_path + ": image/label counts differ");
  }

  const std::size_t pixels = static_cast<std::size_t>(rows) * cols;
  if (image_bytes.size() != 16 + pixels * image_count) {
    throw IoError(IoCode::kTruncated, images_path + ": unexpected file size");
  }
  if (label_bytes.size() != 8 + static_cast<std::size_t>(label_count)) {
    throw IoError(IoCode::kTruncated, labels_path + ": unexpected file size");
  }

  Dataset ds;
  ds.images.resize(static_cast<Index>(pixels), static_cast<Index>(image_count));
  for (std::uint32_t k = 0; k < image_count; ++k) {
    const std::uint8_t* src = image_bytes.data() + 16 + pixels * k;
    for (std::size_t p = 0; p < pixels; ++p) {
      ds.images(static_cast<Index>(p), static_cast<Index>(k)) =
          static_cast<double>(src[p]) / 255.0;
    }
  }
  ds.labels.resize(label_count);
  for (std::uint32_t k = 0; k < label_count; ++k) {
    ds.labels[k] = label_bytes[8 + k];
  }

  std::uint32_t hash = crc32(image_bytes.data(), image_bytes.size());
  hash = crc32(label_bytes.data(), label_bytes.size(), hash);
  char hex[16];
  std::snprintf(hex, sizeof(hex), "%08x", hash);
  ds.source_hash = hex;
  return ds;
}

Dataset subsample(Rng& rng, const Dataset& dataset, Index k) {
  if (k > dataset.size() || k < 0) {
    throw std::domain_error("subsample: k exceeds dataset size");
  }
  std::vector<Index> pool(static_cast<std::size_t>(dataset.size()));
  for (Index i = 0; i < dataset.size(); ++i) {
    pool[static_cast<std::size_t>(i)] = i;
  }
  Dataset out;
  out.images.resize(dataset.pixel_count(), k);
  out.labels.resize(static_cast<std::size_t>(k));
  out.source_hash = dataset.source_hash;
  for (Index i = 0; i < k; ++i) {
    const auto offset = static_cast<std::size_t>(
        rng.next_below(static_cast<std::uint64_t>(dataset.size() - i)));
    const auto slot = static_cast<std::size_t>(i) + offset;
    std::swap(pool[static_cast<std::size_t>(i)], pool[slot]);
    out.images.col(i) = dataset.images.col(pool[static_cast<std::size_t>(i)]);
    out.labels[static_cast<std::size_t>(i)] =
        dataset.labels[static_cast<std::size_t>(pool[static_cast<std::size_t>(i)])];
  }
  return out;
}

}  // namespace dan
