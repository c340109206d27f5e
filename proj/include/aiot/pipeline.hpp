#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "aiot/codec.hpp"
#include "aiot/container.hpp"
#include "aiot/image.hpp"
#include "aiot/model.hpp"
#include "aiot/pca.hpp"

namespace aiot {

struct PipelineConfig {
  Variant variant = Variant::Standard;
  int decimals = 3;                         // optimized: probability rounding, [3, 6]
  std::size_t group_size = kDefaultGroupSize;  // optimized
  int levels = 32;                          // cardinality
  double retain = kDefaultRetainFraction;   // pca
  Backend backend = Backend::Renorm64;

  /// Throws InvalidConfig when a parameter relevant to the variant is out of range.
  void validate() const;
  /// Variant-relevant parameters as "key=value;..." (stable order).
  [[nodiscard]] std::string params_string() const;
};

struct IterationTrace {
  std::uint64_t iterations = 0;
  bool converged_by_threshold = false;  // some certain steps were skipped
  /// Optimized variant: entropy (bits/symbol) after each model refinement
  /// pass: frequency model, rounded, grouped.
  std::vector<double> objective_history;
};

struct CompressResult {
  CompressedArtifact artifact;
  IterationTrace trace;
};

struct RunResult {
  CompressedArtifact artifact;
  GrayImage reconstruction;
  IterationTrace trace;
};

/// Stopping rule for the optimized coder: a step is skipped when coding it
/// would change the interval width by less than half a unit in the n-th
/// decimal, which for a certain symbol (probability 1) always holds.
bool check_stop(double width, double probability, int decimals);

CompressResult compress(const GrayImage& img, const PipelineConfig& cfg);
/// Inverse of whichever variant produced the artifact.
GrayImage decompress(const CompressedArtifact& artifact);

RunResult run_standard(const GrayImage& img, PipelineConfig cfg = {});
RunResult run_pca(const GrayImage& img, PipelineConfig cfg = {});
RunResult run_cardinality(const GrayImage& img, PipelineConfig cfg = {});
RunResult run_optimized(const GrayImage& img, PipelineConfig cfg = {});
/// Dispatches on cfg.variant.
RunResult run(const GrayImage& img, const PipelineConfig& cfg);

}  // namespace aiot
