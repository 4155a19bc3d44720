#pragma once

#include "dan/classifier.hpp"
#include "dan/dataset.hpp"
#include "dan/sparse_infer.hpp"
#include "dan/stack.hpp"

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

namespace dan {

/// CRC-32 (IEEE, reflected 0xEDB88320), chainable via `seed`.
std::uint32_t crc32(const std::uint8_t* data, std::size_t size,
                    std::uint32_t seed = 0);

/// A deployable chain of packed single-bit layers, as stored on disk.
struct PackedNetwork {
  std::vector<SparseBinaryLayer> layers;
};

using LoadedModel = std::variant<DanModel, PackedNetwork>;

// Binary model container: magic "DANM", version u16, layer count u16,
// then per layer a kind tag (u8: 0 dense real, 1 sparse binary), n and d
// as u32, and the payload; a CRC32 of everything before it closes the
// file. All integers and 32-bit IEEE-754 reals are little-endian.
//   dense payload:         c[n], b[d], W row-major (n*d floats)
//   sparse-binary payload: b[d], then per hidden unit the positive mask
//                          then the negative mask, ceil(n/64) words each
//                          (64-bit little-endian words)

void save_model(const DanModel& model, const std::string& path);
void save_model(const QuantizedModel& model, const std::string& path);

/// Throws IoError (kFileOpen / kBadMagic / kBadVersion / kBadCrc /
/// kTruncated / kUnsupported). Dense files load as a DanModel with
/// Bernoulli visible units; sign-quantized files load as a PackedNetwork.
LoadedModel load_model(const std::string& path);

/// Classifier heads reuse the container as a single dense layer with a
/// zero visible bias.
void save_head(const ClassifierHead& head, const std::string& path);
ClassifierHead load_head(const std::string& path);

}  // namespace dan
