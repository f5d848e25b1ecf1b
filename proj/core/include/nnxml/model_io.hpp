#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "nnxml/autoencoder.hpp"
#include "nnxml/nmf.hpp"
#include "nnxml/regressor.hpp"

namespace nnxml {

inline constexpr std::uint32_t kModelFormatVersion = 1;

/// Everything a trained pipeline persists.
///
/// Binary layout, all integers and floats little-endian:
///
///   offset 0   "XLC1"
///          4   u32 format version
///          8   u32 section count
///         12   u32 CRC-32 of bytes [0, 12) followed by the section table
///         16   section table, 32 bytes per section:
///                char tag[4], u32 CRC-32 of payload, u64 offset, u64 length,
///                u64 reserved (0)
///              payloads
///
/// Section tags: ENCS (encoder stack), REGM (regressor), NMFF (NMF
/// factors), CONF (string key/value config), NAME (label names). Matrices
/// are stored as u64 rows, u64 cols and rows*cols f64 values in row-major
/// order. Unknown tags are skipped and reported through `warnings`.
struct ModelContainer {
  std::optional<EncoderStack> encoder;
  std::optional<RegressorModel> regressor;
  std::optional<NmfFactors> nmf;
  std::map<std::string, std::string> config;
  std::vector<std::string> label_names;
  /// Filled by the loader; never serialised.
  std::vector<std::string> warnings;
};

std::vector<std::uint8_t> serialize_model(const ModelContainer& model);
/// Throws ModelFormatError (bad magic, truncation, malformed payload),
/// UnsupportedVersionError or ChecksumError naming the damaged section.
ModelContainer deserialize_model(std::span<const std::uint8_t> bytes);

void save_model(const std::filesystem::path& path, const ModelContainer& model);
ModelContainer load_model(const std::filesystem::path& path);

}  // namespace nnxml
