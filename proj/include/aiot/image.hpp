#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include <Eigen/Core>

namespace aiot {

/// 8-bit single-channel raster. rows() is the height, cols() the width;
/// storage is row-major so data() is the flattened pixel order.
using GrayImage = Eigen::Matrix<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

using Bytes = std::vector<std::uint8_t>;

/// Symbols drawn from [0, alphabet_bound).
struct SymbolSequence {
  std::vector<std::uint32_t> symbols;
  std::uint32_t alphabet_bound = 0;

  [[nodiscard]] std::size_t size() const noexcept { return symbols.size(); }
  [[nodiscard]] bool empty() const noexcept { return symbols.empty(); }
  bool operator==(const SymbolSequence&) const = default;
};

// Binary PGM (P5, maxval 255).
GrayImage load_pgm(std::span<const std::uint8_t> bytes);
Bytes write_pgm(const GrayImage& img);

// P5, or P6 converted through to_grayscale.
GrayImage load_image(std::span<const std::uint8_t> bytes);

/// ITU-R BT.601 luma, truncated: floor(0.299 r + 0.587 g + 0.114 b).
constexpr std::uint8_t to_grayscale(std::uint8_t r, std::uint8_t g, std::uint8_t b) noexcept {
  const unsigned luma = (299u * r + 587u * g + 114u * b) / 1000u;
  return static_cast<std::uint8_t>(luma > 255u ? 255u : luma);
}

SymbolSequence flatten(const GrayImage& img);

// Inverse of flatten; every symbol must fit in 8 bits.
GrayImage unflatten(std::span<const std::uint32_t> symbols, Eigen::Index width, Eigen::Index height);

Bytes read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);

}  // namespace aiot
