#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "aiot/metrics.hpp"
#include "aiot/pipeline.hpp"

namespace aiot {

struct Measured {
  CompressResult compressed;
  GrayImage reconstruction;
  RunMetrics metrics;
};

/// Compresses `img` under `cfg`, timing only the compression, then decodes
/// the artifact to score the reconstruction. Resource sampling is optional
/// because it serializes concurrent runs.
Measured measure(const GrayImage& img, const PipelineConfig& cfg, bool sample = true);

nlohmann::json to_json(const RunMetrics& m);

struct BenchConfig {
  std::vector<Variant> variants{Variant::Standard};
  std::vector<int> thresholds{3};  // decimals swept for the optimized variant
  PipelineConfig base;
  unsigned jobs = 0;        // 0 = logical cores
  bool resources = true;    // sample cpu/memory; forces serial execution
};

struct BenchRow {
  std::string image;
  std::string variant;
  std::string params;
  std::optional<RunMetrics> metrics;  // absent for an error row
  std::string error;
};

struct BenchReport {
  std::vector<BenchRow> rows;
  BenchConfig config;
  unsigned jobs_used = 1;

  [[nodiscard]] std::size_t successes() const;
};

/// Runs every (image, variant, parameter) cell over the regular files in
/// `dataset`. Unreadable images and pipeline failures become error rows.
/// Rows are ordered by image name, then variant, then params.
BenchReport run_bench(const std::filesystem::path& dataset, const BenchConfig& cfg);

inline constexpr std::string_view kCsvHeader =
    "image,variant,params,original_bytes,compressed_payload_bytes,compressed_total_bytes,ratio,time_s,iterations,rmse,"
    "cpu_percent,mem_mb,error";

std::string to_csv(const BenchReport& report);
/// RFC 4180 reader: quoted fields may hold commas, quotes ("") and newlines.
std::vector<std::vector<std::string>> parse_csv(std::string_view text);

/// Rows, per-(variant, params) means and medians, environment and config echo.
nlohmann::json to_json(const BenchReport& report);

}  // namespace aiot
