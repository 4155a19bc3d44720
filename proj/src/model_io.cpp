#include "dan/model_io.hpp"

#include "dan/quantize.hpp"

#include <array>
#include <bit>
#include <cstring>
#include <fstream>

namespace dan {

namespace {

constexpr std::array<char, 4> kMagic = {'D', 'A', 'N', 'M'};
constexpr std::uint16_t kVersion = 1;

std::array<std::uint32_t, 256> make_crc_table() {
  std::array<std::uint32_t, 256> table{};
  for (std::uint32_t i = 0; i < 256; ++i) {
    std::uint32_t c = i;
    for (int k = 0; k < 8; ++k) {
      c = (c & 1u) ? 0xEDB88320u ^ (c >> 1) : c >> 1;
    }
    table[i] = c;
  }
  return table;
}

class ByteWriter {
 public:
  void u8(std::uint8_t v) { bytes_.push_back(v); }
  void u16(std::uint16_t v) {
    for (int k = 0; k < 2; ++k) bytes_.push_back((v >> (8 * k)) & 0xFF);
  }
  void u32(std::uint32_t v) {
    for (int k = 0; k < 4; ++k) bytes_.push_back((v >> (8 * k)) & 0xFF);
  }
  void u64(std::uint64_t v) {
    for (int k = 0; k < 8; ++k) bytes_.push_back((v >> (8 * k)) & 0xFF);
  }
  void f32(float v) { u32(std::bit_cast<std::uint32_t>(v)); }

  const std::vector<std::uint8_t>& bytes() const { return bytes_; }

 private:
  std::vector<std::uint8_t> bytes_;
};

class ByteReader {
 public:
  ByteReader(std::vector<std::uint8_t> bytes, std::string path)
      : bytes_(std::move(bytes)), path_(std::move(path)) {}

  std::uint8_t u8() { return take(1)[0]; }
  std::uint16_t u16() {
    const auto* p = take(2);
    return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
  }
  std::uint32_t u32() {
    const auto* p = take(4);
    return static_cast<std::uint32_t>(p[0]) |
           (static_cast<std::uint32_t>(p[1]) << 8) |
           (static_cast<std::uint32_t>(p[2]) << 16) |
           (static_cast<std::uint32_t>(p[3]) << 24);
  }
  std::uint64_t u64() {
    std::uint64_t v = 0;
    const auto* p = take(8);
    for (int k = 7; k >= 0; --k) v = (v << 8) | p[k];
    return v;
  }
  float f32() { return std::bit_cast<float>(u32()); }

  std::size_t offset() const { return offset_; }
  std::size_t size() const { return bytes_.size(); }
  const std::vector<std::uint8_t>& bytes() const { return bytes_; }

 private:
  const std::uint8_t* take(std::size_t n) {
    if (offset_ + n > bytes_.size()) {
      throw IoError(IoCode::kTruncated, path_ + ": unexpected end of file");
    }
    const std::uint8_t* p = bytes_.data() + offset_;
    offset_ += n;
    return p;
  }

  std::vector<std::uint8_t> bytes_;
  std::string path_;
  std::size_t offset_ = 0;
};

void write_dense_layer(ByteWriter& out, const Matrix& w, const Vector& b,
                       const Vector& c) {
  out.u8(0);
  out.u32(static_cast<std::uint32_t>(w.rows()));
  out.u32(static_cast<std::uint32_t>(w.cols()));
  for (Index i = 0; i < c.size(); ++i) out.f32(static_cast<float>(c(i)));
  for (Index j = 0; j < b.size(); ++j) out.f32(static_cast<float>(b(j)));
  for (Index i = 0; i < w.rows(); ++i) {
    for (Index j = 0; j < w.cols(); ++j) out.f32(static_cast<float>(w(i, j)));
  }
}

void write_packed_layer(ByteWriter& out, const SparseBinaryLayer& layer) {
  out.u8(1);
  out.u32(static_cast<std::uint32_t>(layer.visible_count));
  out.u32(static_cast<std::uint32_t>(layer.hidden_count));
  for (Index j = 0; j < layer.hidden_count; ++j) {
    out.f32(static_cast<float>(layer.bias(j)));
  }
  for (Index j = 0; j < layer.hidden_count; ++j) {
    const auto u = static_cast<std::size_t>(j);
    for (std::size_t k = 0; k < layer.pos_masks[u].word_count(); ++k) {
      out.u64(layer.pos_masks[u].words()[k]);
    }
    for (std::size_t k = 0; k < layer.neg_masks[u].word_count(); ++k) {
      out.u64(layer.neg_masks[u].words()[k]);
    }
  }
}

void write_file(const ByteWriter& body, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError(IoCode::kFileOpen, "cannot open " + path);
  const auto& bytes = body.bytes();
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  ByteWriter crc;
  crc.u32(crc32(bytes.data(), bytes.size()));
  out.write(reinterpret_cast<const char*>(crc.bytes().data()), 4);
  if (!out) throw IoError(IoCode::kFileOpen, "write failed: " + path);
}

ByteWriter begin_file(std::size_t layer_count) {
  ByteWriter out;
  for (char c : kMagic) out.u8(static_cast<std::uint8_t>(c));
  out.u16(kVersion);
  out.u16(static_cast<std::uint16_t>(layer_count));
  return out;
}

}  // namespace

std::uint32_t crc32(const std::uint8_t* data, std::size_t size,
                    std::uint32_t seed) {
  static const auto table = make_crc_table();
  std::uint32_t c = seed ^ 0xFFFFFFFFu;
  for (std::size_t i = 0; i < size; ++i) {
    c = table[(c ^ data[i]) & 0xFFu] ^ (c >> 8);
  }
  return c ^ 0xFFFFFFFFu;
}

void save_model(const DanModel& model, const std::string& path) {
  ByteWriter out = begin_file(model.layers.size());
  for (const RbmParams& layer : model.layers) {
    write_dense_layer(out, layer.weights, layer.hidden_bias,
                      layer.visible_bias);
  }
  write_file(out, path);
}

void save_model(const QuantizedModel& model, const std::string& path) {
  ByteWriter out = begin_file(model.weights.size());
  if (model.mode == QuantMode::kSparseReal) {
    for (std::size_t l = 0; l < model.weights.size(); ++l) {
      write_dense_layer(out, model.weights[l], model.hidden_biases[l],
                        model.visible_biases[l]);
    }
  } else {
    for (const SparseBinaryLayer& layer : pack_network(model)) {
      write_packed_layer(out, layer);
    }
  }
  write_file(out, path);
}

LoadedModel load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(IoCode::kFileOpen, "cannot open " + path);
  std::vector<std::uint8_t> bytes{std::istreambuf_iterator<char>(in),
                                  std::istreambuf_iterator<char>()};
  if (bytes.size() < 12) {
    throw IoError(IoCode::kTruncated, path + ": too short for a model file");
  }
  const std::uint32_t stored_crc =
      static_cast<std::uint32_t>(bytes[bytes.size() - 4]) |
      (static_cast<std::uint32_t>(bytes[bytes.size() - 3]) << 8) |
      (static_cast<std::uint32_t>(bytes[bytes.size() - 2]) << 16) |
      (static_cast<std::uint32_t>(bytes[bytes.size() - 1]) << 24);
  if (crc32(bytes.data(), bytes.size() - 4) != stored_crc) {
    throw IoError(IoCode::kBadCrc, path + ": checksum mismatch");
  }
  bytes.resize(bytes.size() - 4);

  ByteReader reader(std::move(bytes), path);
  for (char c : kMagic) {
    if (reader.u8() != static_cast<std::uint8_t>(c)) {
      throw IoError(IoCode::kBadMagic, path + ": not a model file");
    }
  }
  if (reader.u16() != kVersion) {
    throw IoError(IoCode::kBadVersion, path + ": unknown format version");
  }
  const std::uint16_t layer_count = reader.u16();

  DanModel dense;
  PackedNetwork packed;
  for (std::uint16_t l = 0; l < layer_count; ++l) {
    const std::uint8_t kind = reader.u8();
    const auto n = static_cast<Index>(reader.u32());
    const auto d = static_cast<Index>(reader.u32());
    if (kind == 0) {
      RbmParams layer;
      layer.visible_bias.resize(n);
      layer.hidden_bias.resize(d);
      layer.weights.resize(n, d);
      for (Index i = 0; i < n; ++i) layer.visible_bias(i) = reader.f32();
      for (Index j = 0; j < d; ++j) layer.hidden_bias(j) = reader.f32();
      for (Index i = 0; i < n; ++i) {
        for (Index j = 0; j < d; ++j) layer.weights(i, j) = reader.f32();
      }
      dense.layers.push_back(std::move(layer));
    } else if (kind == 1) {
      SparseBinaryLayer layer;
      layer.visible_count = n;
      layer.hidden_count = d;
      layer.bias.resize(d);
      for (Index j = 0; j < d; ++j) layer.bias(j) = reader.f32();
      const std::size_t words = (static_cast<std::size_t>(n) + 63) / 64;
      for (Index j = 0; j < d; ++j) {
        BitVector pos(static_cast<std::size_t>(n));
        BitVector neg(static_cast<std::size_t>(n));
        for (std::size_t k = 0; k < words; ++k) {
          const std::uint64_t word = reader.u64();
          for (int bit = 0; bit < 64; ++bit) {
            const std::size_t i = k * 64 + static_cast<std::size_t>(bit);
            if (i < static_cast<std::size_t>(n) && ((word >> bit) & 1u)) {
              pos.set(i);
            }
          }
        }
        for (std::size_t k = 0; k < words; ++k) {
          const std::uint64_t word = reader.u64();
          for (int bit = 0; bit < 64; ++bit) {
            const std::size_t i = k * 64 + static_cast<std::size_t>(bit);
            if (i < static_cast<std::size_t>(n) && ((word >> bit) & 1u)) {
              neg.set(i);
            }
          }
        }
        layer.pos_masks.push_back(std::move(pos));
        layer.neg_masks.push_back(std::move(neg));
      }
      packed.layers.push_back(std::move(layer));
    } else {
      throw IoError(IoCode::kUnsupported, path + ": unknown layer kind");
    }
  }
  if (reader.offset() != reader.size()) {
    throw IoError(IoCode::kTruncated, path + ": trailing bytes after layers");
  }
  if (!dense.layers.empty() && !packed.layers.empty()) {
    throw IoError(IoCode::kUnsupported, path + ": mixed layer kinds");
  }
  if (!packed.layers.empty()) return packed;
  return dense;
}

void save_head(const ClassifierHead& head, const std::string& path) {
  ByteWriter out = begin_file(1);
  write_dense_layer(out, head.weight, head.bias,
                    Vector::Zero(head.weight.rows()));
  write_file(out, path);
}

ClassifierHead load_head(const std::string& path) {
  const LoadedModel loaded = load_model(path);
  const auto* dense = std::get_if<DanModel>(&loaded);
  if (dense == nullptr || dense->layers.size() != 1) {
    throw IoError(IoCode::kUnsupported, path + ": not a classifier head file");
  }
  ClassifierHead head;
  head.weight = dense->layers[0].weights;
  head.bias = dense->layers[0].hidden_bias;
  return head;
}

}  // namespace dan
