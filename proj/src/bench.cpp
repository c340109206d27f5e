#include "aiot/bench.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <map>
#include <sstream>
#include <thread>

#include "aiot/error.hpp"

namespace aiot {
namespace {

std::string format_double(double v, int precision) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", precision, v);
  return buf;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const auto n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

double mean(const std::vector<double>& v) {
  double sum = 0.0;
  for (double x : v) sum += x;
  return sum / static_cast<double>(v.size());
}

struct Cell {
  std::size_t image_index;
  PipelineConfig cfg;
};

}  // namespace

Measured measure(const GrayImage& img, const PipelineConfig& cfg, bool sample) {
  Measured out;
  ResourceUsage usage;
  if (sample) {
    auto [timed_result, resources] = sample_resources([&] { return timed([&] { return compress(img, cfg); }); });
    out.compressed = std::move(timed_result.first);
    out.metrics.wall_time_s = timed_result.second;
    usage = std::move(resources);
  } else {
    auto [result, seconds] = timed([&] { return compress(img, cfg); });
    out.compressed = std::move(result);
    out.metrics.wall_time_s = seconds;
  }

  const auto& artifact = out.compressed.artifact;
  out.reconstruction = decompress(artifact);

  auto& m = out.metrics;
  m.original_bytes = static_cast<std::uint64_t>(img.size());
  m.compressed_bytes = artifact.payload_bytes();
  m.compressed_bytes_total = serialize(artifact).size();
  m.ratio = compression_ratio(m.original_bytes, m.compressed_bytes_total);
  if (m.compressed_bytes > 0) m.payload_ratio = compression_ratio(m.original_bytes, m.compressed_bytes);
  m.iterations = out.compressed.trace.iterations;
  m.rmse = rmse(img, out.reconstruction);
  m.cpu_percent = usage.cpu_percent;
  m.mem_mb = usage.mem_mb;
  return out;
}

nlohmann::json to_json(const RunMetrics& m) {
  nlohmann::json j;
  j["original_bytes"] = m.original_bytes;
  j["compressed_payload_bytes"] = m.compressed_bytes;
  j["compressed_total_bytes"] = m.compressed_bytes_total;
  j["ratio"] = m.ratio.display();
  j["ratio_exact"] = {m.ratio.numerator, m.ratio.denominator};
  if (m.payload_ratio) {
    j["payload_ratio"] = m.payload_ratio->display();
    j["payload_ratio_exact"] = {m.payload_ratio->numerator, m.payload_ratio->denominator};
  } else {
    j["payload_ratio"] = nullptr;
  }
  j["time_s"] = m.wall_time_s;
  j["iterations"] = m.iterations;
  j["rmse"] = m.rmse;
  j["cpu_percent"] = m.cpu_percent ? nlohmann::json(*m.cpu_percent) : nlohmann::json(nullptr);
  j["mem_mb"] = m.mem_mb ? nlohmann::json(*m.mem_mb) : nlohmann::json(nullptr);
  return j;
}

std::size_t BenchReport::successes() const {
  return static_cast<std::size_t>(std::count_if(rows.begin(), rows.end(), [](const BenchRow& r) { return r.metrics.has_value(); }));
}

BenchReport run_bench(const std::filesystem::path& dataset, const BenchConfig& cfg) {
  if (!std::filesystem::is_directory(dataset)) throw Error(ErrorCode::Io, dataset.string() + " is not a directory");
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dataset)) {
    if (entry.is_regular_file()) files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());

  std::vector<Cell> cells;
  for (std::size_t i = 0; i < files.size(); ++i) {
    for (auto variant : cfg.variants) {
      PipelineConfig c = cfg.base;
      c.variant = variant;
      if (variant == Variant::Optimized) {
        for (int n : cfg.thresholds) {
          c.decimals = n;
          cells.push_back({i, c});
        }
      } else {
        cells.push_back({i, c});
      }
    }
  }

  BenchReport report;
  report.config = cfg;
  report.rows.resize(cells.size());

  // Images are decoded once; a load failure is reported in every cell of that image.
  std::vector<std::optional<GrayImage>> images(files.size());
  std::vector<std::string> load_errors(files.size());
  for (std::size_t i = 0; i < files.size(); ++i) {
    try {
      images[i] = load_image(read_file(files[i]));
    } catch (const std::exception& e) {
      load_errors[i] = e.what();
    }
  }

  auto run_cell = [&](std::size_t index) {
    const auto& cell = cells[index];
    auto& row = report.rows[index];
    row.image = files[cell.image_index].filename().string();
    row.variant = std::string(to_string(cell.cfg.variant));
    row.params = cell.cfg.params_string();
    if (!images[cell.image_index]) {
      row.error = load_errors[cell.image_index];
      return;
    }
    try {
      row.metrics = measure(*images[cell.image_index], cell.cfg, cfg.resources).metrics;
    } catch (const std::exception& e) {
      row.error = e.what();
    }
  };

  unsigned jobs = cfg.jobs == 0 ? std::max(1u, std::thread::hardware_concurrency()) : cfg.jobs;
  if (cfg.resources) jobs = 1;
  report.jobs_used = jobs;
  if (jobs == 1) {
    for (std::size_t i = 0; i < cells.size(); ++i) run_cell(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> workers;
    for (unsigned t = 0; t < jobs; ++t) {
      workers.emplace_back([&] {
        for (std::size_t i = next++; i < cells.size(); i = next++) run_cell(i);
      });
    }
  }

  std::stable_sort(report.rows.begin(), report.rows.end(), [](const BenchRow& a, const BenchRow& b) {
    return std::tie(a.image, a.variant, a.params) < std::tie(b.image, b.variant, b.params);
  });
  return report;
}

std::string to_csv(const BenchReport& report) {
  std::ostringstream out;
  out << kCsvHeader << "\r\n";
  for (const auto& row : report.rows) {
    out << csv_field(row.image) << ',' << csv_field(row.variant) << ',' << csv_field(row.params) << ',';
    if (row.metrics) {
      const auto& m = *row.metrics;
      out << m.original_bytes << ',' << m.compressed_bytes << ',' << m.compressed_bytes_total << ','
          << m.ratio.display() << ',' << format_double(m.wall_time_s, 6) << ',' << m.iterations << ','
          << format_double(m.rmse, 6) << ',' << (m.cpu_percent ? format_double(*m.cpu_percent, 2) : "") << ','
          << (m.mem_mb ? format_double(*m.mem_mb, 4) : "") << ',';
    } else {
      out << ",,,,,,,,,";
    }
    out << csv_field(row.error) << "\r\n";
  }
  return out.str();
}

std::vector<std::vector<std::string>> parse_csv(std::string_view text) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string field;
  bool quoted = false;
  bool row_started = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field += c;
      }
      continue;
    }
    row_started = true;
    if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      row.push_back(std::move(field));
      field.clear();
    } else if (c == '\r' || c == '\n') {
      if (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n') ++i;
      row.push_back(std::move(field));
      field.clear();
      rows.push_back(std::move(row));
      row.clear();
      row_started = false;
    } else {
      field += c;
    }
  }
  if (quoted) throw Error(ErrorCode::MalformedHeader, "unterminated quoted CSV field");
  if (row_started) {
    row.push_back(std::move(field));
    rows.push_back(std::move(row));
  }
  return rows;
}

nlohmann::json to_json(const BenchReport& report) {
  nlohmann::json j;
  j["rows"] = nlohmann::json::array();
  std::map<std::pair<std::string, std::string>, std::vector<const RunMetrics*>> groups;
  std::map<std::pair<std::string, std::string>, std::size_t> errors;
  for (const auto& row : report.rows) {
    nlohmann::json r{{"image", row.image}, {"variant", row.variant}, {"params", row.params}};
    if (row.metrics) {
      r["metrics"] = to_json(*row.metrics);
      groups[{row.variant, row.params}].push_back(&*row.metrics);
    } else {
      r["error"] = row.error;
      groups.try_emplace({row.variant, row.params});
      ++errors[{row.variant, row.params}];
    }
    j["rows"].push_back(std::move(r));
  }

  j["aggregate"] = nlohmann::json::array();
  for (const auto& [key, runs] : groups) {
    nlohmann::json a{{"variant", key.first}, {"params", key.second}, {"runs", runs.size()}, {"errors", errors[key]}};
    if (!runs.empty()) {
      auto column = [&](auto get) {
        std::vector<double> v;
        for (const auto* m : runs) {
          if (auto x = get(*m)) v.push_back(*x);
        }
        if (v.empty()) return nlohmann::json(nullptr);
        return nlohmann::json{{"mean", mean(v)}, {"median", median(v)}};
      };
      a["ratio"] = column([](const RunMetrics& m) { return std::optional<double>(m.ratio.value()); });
      a["time_s"] = column([](const RunMetrics& m) { return std::optional<double>(m.wall_time_s); });
      a["iterations"] = column([](const RunMetrics& m) { return std::optional<double>(static_cast<double>(m.iterations)); });
      a["rmse"] = column([](const RunMetrics& m) { return std::optional<double>(m.rmse); });
      a["cpu_percent"] = column([](const RunMetrics& m) { return m.cpu_percent; });
      a["mem_mb"] = column([](const RunMetrics& m) { return m.mem_mb; });
    }
    j["aggregate"].push_back(std::move(a));
  }

  j["environment"] = {
      {"clock", "steady_clock"},
      {"logical_cores", std::thread::hardware_concurrency()},
      {"resource_sampling", report.config.resources && ResourceSampler::supported()},
      {"jobs", report.jobs_used},
  };
  nlohmann::json variants = nlohmann::json::array();
  for (auto v : report.config.variants) variants.push_back(std::string(to_string(v)));
  const auto& base = report.config.base;
  j["config"] = {
      {"variants", variants},
      {"thresholds", report.config.thresholds},
      {"levels", base.levels},
      {"group_size", base.group_size},
      {"retain", base.retain},
      {"backend", std::string(to_string(base.backend))},
      {"resources", report.config.resources},
  };
  return j;
}

}  // namespace aiot
