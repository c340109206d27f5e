#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "aiot/codec.hpp"
#include "aiot/image.hpp"
#include "aiot/model.hpp"

namespace aiot {

inline constexpr std::array<std::uint8_t, 4> kMagic{'A', 'I', 'O', 'T'};
inline constexpr std::uint8_t kFormatVersion = 1;

enum class Variant : std::uint8_t { Standard = 0, Pca = 1, Cardinality = 2, Optimized = 3 };

std::string_view to_string(Variant variant) noexcept;
Variant parse_variant(std::string_view name);

/// PCA reconstruction dictionary. Matrices are row-major.
struct PcaSection {
  std::uint32_t k = 0;
  std::uint8_t score_bits = 16;
  std::vector<double> mean;        // width
  std::vector<double> components;  // k * width
  std::vector<double> score_min;   // k
  std::vector<double> score_max;   // k
  bool operator==(const PcaSection&) const = default;
};

/// Everything needed to reproduce a reconstruction: the header selects the
/// decoder path and the payload is the raw codeword.
struct CompressedArtifact {
  std::uint8_t version = kFormatVersion;
  Variant variant = Variant::Standard;
  Backend backend = Backend::Renorm64;
  std::uint32_t width = 0;
  std::uint32_t height = 0;
  std::uint64_t n_symbols = 0;  // coded positions, including skipped certain steps

  // variant parameters
  double retain = 0.0;            // pca
  std::uint16_t levels = 0;       // cardinality
  std::uint8_t decimals = 0;      // optimized
  std::uint8_t group_size = 0;    // optimized

  ProbabilityModel model;                      // coded alphabet
  std::vector<std::uint8_t> representatives;   // optimized: one per model entry
  PcaSection pca;

  Bytes payload;
  std::uint64_t payload_bits = 0;

  [[nodiscard]] std::uint64_t payload_bytes() const noexcept { return (payload_bits + 7) / 8; }
  bool operator==(const CompressedArtifact&) const = default;
};

/// Little-endian fixed layout:
///   magic(4) version(1) variant(1) width(4) height(4) n_symbols(8)
///   params:  backend(1) + pca: retain f64, score_bits u8
///                       | cardinality: levels u16
///                       | optimized: decimals u8, group_size u8
///   model:   order(1) count u32 total u64 { symbol u16, weight u32 } * count
///   recon:   optimized: count u32 { representative u8 } * count
///            pca: k u32, mean f64 * width, components f64 * k * width,
///                 score_min f64 * k, score_max f64 * k
///   payload_bit_len u64, payload bytes (MSB-first, zero padded)
Bytes serialize(const CompressedArtifact& artifact);
CompressedArtifact deserialize(std::span<const std::uint8_t> bytes);

}  // namespace aiot
