#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "aiot/image.hpp"
#include "aiot/model.hpp"

namespace aiot::test {

using Rng = std::mt19937_64;

inline GrayImage random_image(Rng& rng, Eigen::Index width, Eigen::Index height, int lo = 0, int hi = 255) {
  std::uniform_int_distribution<int> pixel(lo, hi);
  GrayImage img(height, width);
  for (Eigen::Index i = 0; i < img.size(); ++i) img.data()[i] = static_cast<std::uint8_t>(pixel(rng));
  return img;
}

inline GrayImage ramp_image() {
  GrayImage img(1, 256);
  for (int i = 0; i < 256; ++i) img(0, i) = static_cast<std::uint8_t>(i);
  return img;
}

// Smooth gradients, a few soft blobs and mild sensor noise; stands in for a
// natural photograph of the given size.
inline GrayImage scene_image(Eigen::Index width, Eigen::Index height, std::uint64_t seed = 2024) {
  Rng rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> noise(0.0, 3.0);
  struct Blob {
    double x, y, r, amp;
  };
  std::vector<Blob> blobs;
  for (int b = 0; b < 6; ++b) {
    blobs.push_back({unit(rng) * width, unit(rng) * height, (0.08 + 0.2 * unit(rng)) * std::min(width, height),
                     (unit(rng) - 0.4) * 120.0});
  }
  GrayImage img(height, width);
  for (Eigen::Index y = 0; y < height; ++y) {
    for (Eigen::Index x = 0; x < width; ++x) {
      double v = 60.0 + 90.0 * static_cast<double>(x) / width + 40.0 * static_cast<double>(y) / height;
      for (const auto& b : blobs) {
        const double dx = (x - b.x) / b.r;
        const double dy = (y - b.y) / b.r;
        v += b.amp * std::exp(-(dx * dx + dy * dy));
      }
      v += noise(rng);
      img(y, x) = static_cast<std::uint8_t>(std::clamp(std::floor(v + 0.5), 0.0, 255.0));
    }
  }
  return img;
}

inline std::vector<std::uint32_t> random_sequence(Rng& rng, std::size_t length, std::uint32_t alphabet) {
  std::uniform_int_distribution<std::uint32_t> sym(0, alphabet - 1);
  std::vector<std::uint32_t> out(length);
  for (auto& s : out) s = sym(rng);
  return out;
}

// Skewed draw: symbol i has weight proportional to (i + 1)^-s.
inline std::vector<std::uint32_t> zipf_sequence(Rng& rng, std::size_t length, std::uint32_t alphabet, double s) {
  std::vector<double> w(alphabet);
  for (std::uint32_t i = 0; i < alphabet; ++i) w[i] = std::pow(i + 1.0, -s);
  std::discrete_distribution<std::uint32_t> sym(w.begin(), w.end());
  std::vector<std::uint32_t> out(length);
  for (auto& x : out) x = sym(rng);
  return out;
}

inline SymbolSequence as_sequence(std::vector<std::uint32_t> symbols, std::uint32_t bound = 256) {
  SymbolSequence seq;
  seq.symbols = std::move(symbols);
  seq.alphabet_bound = bound;
  return seq;
}

}  // namespace aiot::test
