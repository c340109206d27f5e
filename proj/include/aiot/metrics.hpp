#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "aiot/error.hpp"

namespace aiot {

/// original / compressed, kept exact (reduced fraction) alongside the
/// rounded "N:1" display form.
struct CompressionRatio {
  std::uint64_t numerator = 0;
  std::uint64_t denominator = 1;
  std::uint64_t rounded = 0;  // half-up

  [[nodiscard]] double value() const noexcept {
    return static_cast<double>(numerator) / static_cast<double>(denominator);
  }
  [[nodiscard]] std::string display() const { return std::to_string(rounded) + ":1"; }
  bool operator==(const CompressionRatio&) const = default;
};

CompressionRatio compression_ratio(std::uint64_t original_bytes, std::uint64_t compressed_bytes);

/// Root mean square difference over all elements.
template <typename DerivedA, typename DerivedB>
double rmse(const Eigen::MatrixBase<DerivedA>& a, const Eigen::MatrixBase<DerivedB>& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw Error(ErrorCode::DimensionMismatch, "rmse operands differ in shape");
  }
  if (a.size() == 0) return 0.0;
  const double sse = (a.template cast<double>() - b.template cast<double>()).squaredNorm();
  return std::sqrt(sse / static_cast<double>(a.size()));
}

/// Runs `op` and measures its duration on the monotonic clock. Returns the
/// seconds for void callables, otherwise (result, seconds).
template <typename F>
auto timed(F&& op) {
  using Clock = std::chrono::steady_clock;
  const auto start = Clock::now();
  if constexpr (std::is_void_v<std::invoke_result_t<F>>) {
    std::forward<F>(op)();
    return std::chrono::duration<double>(Clock::now() - start).count();
  } else {
    auto result = std::forward<F>(op)();
    const double seconds = std::chrono::duration<double>(Clock::now() - start).count();
    return std::pair<decltype(result), double>{std::move(result), seconds};
  }
}

struct ResourceSample {
  double elapsed_s = 0.0;
  double cpu_s = 0.0;  // process user + system time
  double rss_mb = 0.0;
};

struct ResourceUsage {
  std::optional<double> cpu_percent;  // process CPU time / wall time * 100
  std::optional<double> mem_mb;       // peak resident delta
  std::vector<ResourceSample> samples;
};

/// Background sampler of process CPU time and resident memory.
class ResourceSampler {
 public:
  explicit ResourceSampler(std::chrono::milliseconds cadence = std::chrono::milliseconds(100));
  ~ResourceSampler();
  ResourceSampler(const ResourceSampler&) = delete;
  ResourceSampler& operator=(const ResourceSampler&) = delete;

  void start();
  ResourceUsage stop();

  /// False when the platform cannot report CPU time or resident memory.
  static bool supported();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// Runs `op` with a sampler beside it. Metrics come back empty on an
/// unsupported platform; the run itself still happens.
template <typename F>
auto sample_resources(F&& op) {
  ResourceSampler sampler;
  sampler.start();
  if constexpr (std::is_void_v<std::invoke_result_t<F>>) {
    std::forward<F>(op)();
    return sampler.stop();
  } else {
    auto result = std::forward<F>(op)();
    auto usage = sampler.stop();
    return std::pair<decltype(result), ResourceUsage>{std::move(result), std::move(usage)};
  }
}

struct RunMetrics {
  std::uint64_t original_bytes = 0;
  std::uint64_t compressed_bytes = 0;        // payload only
  std::uint64_t compressed_bytes_total = 0;  // payload + header
  CompressionRatio ratio;                    // original / total
  std::optional<CompressionRatio> payload_ratio;  // original / payload; absent for an empty payload
  double wall_time_s = 0.0;
  std::uint64_t iterations = 0;
  double rmse = 0.0;
  std::optional<double> cpu_percent;
  std::optional<double> mem_mb;
};

}  // namespace aiot
