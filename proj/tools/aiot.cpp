// aiot: compress / decompress grayscale images with the arithmetic coding
// pipelines and benchmark them over an image directory.
//
// Exit codes: 0 success, 1 run failure, 2 usage error.

#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "aiot/bench.hpp"
#include "aiot/error.hpp"
#include "aiot/pipeline.hpp"

namespace {

constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;

struct PipelineFlags {
  std::string variant = "standard";
  int decimals = 3;
  std::size_t group_size = aiot::kDefaultGroupSize;
  int levels = 32;
  double retain = aiot::kDefaultRetainFraction;
  std::string backend = "renorm64";

  void attach(CLI::App& cmd, bool with_variant) {
    if (with_variant) {
      cmd.add_option("--variant", variant, "Pipeline variant")
          ->check(CLI::IsMember({"standard", "pca", "cardinality", "optimized"}));
    }
    cmd.add_option("--decimals", decimals, "Probability rounding decimals (optimized)")->check(CLI::Range(3, 6));
    cmd.add_option("--group-size", group_size, "Maximum symbols per group (optimized)")->check(CLI::Range(1, 255));
    cmd.add_option("--levels", levels, "Quantizer levels (cardinality)")->check(CLI::Range(2, 256));
    cmd.add_option("--retain", retain, "Fraction of PCA components kept (pca)")->check(CLI::Range(1e-9, 1.0));
    cmd.add_option("--backend", backend, "Coder backend")->check(CLI::IsMember({"exact", "renorm64"}));
  }

  aiot::PipelineConfig config() const {
    aiot::PipelineConfig cfg;
    cfg.variant = aiot::parse_variant(variant);
    cfg.decimals = decimals;
    cfg.group_size = group_size;
    cfg.levels = levels;
    cfg.retain = retain;
    cfg.backend = aiot::parse_backend(backend);
    return cfg;
  }
};

int cmd_compress(const std::string& input, const std::string& output, const PipelineFlags& flags) {
  const auto img = aiot::load_image(aiot::read_file(input));
  const auto measured = aiot::measure(img, flags.config());
  aiot::write_file(output, aiot::serialize(measured.compressed.artifact));
  auto j = aiot::to_json(measured.metrics);
  j["variant"] = flags.variant;
  j["params"] = flags.config().params_string();
  std::cout << j.dump(2) << '\n';
  return 0;
}

int cmd_decompress(const std::string& input, const std::string& output) {
  const auto artifact = aiot::deserialize(aiot::read_file(input));
  aiot::write_file(output, aiot::write_pgm(aiot::decompress(artifact)));
  return 0;
}

int cmd_bench(const std::string& dataset, const std::vector<std::string>& variants, const std::vector<int>& thresholds,
              const std::string& report_path, const std::string& format, const PipelineFlags& flags, unsigned jobs,
              bool no_resources) {
  aiot::BenchConfig cfg;
  cfg.variants.clear();
  for (const auto& v : variants) cfg.variants.push_back(aiot::parse_variant(v));
  cfg.thresholds = thresholds;
  cfg.base = flags.config();
  cfg.jobs = jobs;
  cfg.resources = !no_resources;

  const auto report = aiot::run_bench(dataset, cfg);
  const auto summary = aiot::to_json(report);
  if (format == "json") {
    aiot::write_file(report_path, [&] {
      const auto text = summary.dump(2);
      return aiot::Bytes(text.begin(), text.end());
    }());
  } else {
    const auto csv = aiot::to_csv(report);
    aiot::write_file(report_path, aiot::Bytes(csv.begin(), csv.end()));
    nlohmann::json aggregate{{"aggregate", summary["aggregate"]},
                             {"environment", summary["environment"]},
                             {"config", summary["config"]}};
    const auto text = aggregate.dump(2);
    aiot::write_file(report_path + ".summary.json", aiot::Bytes(text.begin(), text.end()));
  }
  std::cerr << report.successes() << " of " << report.rows.size() << " runs succeeded\n";
  return report.successes() > 0 ? 0 : kExitFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Arithmetic coding compression toolkit for grayscale images"};
  app.require_subcommand(1);

  std::string input;
  std::string output;
  PipelineFlags compress_flags;
  auto* compress = app.add_subcommand("compress", "Compress a PGM/PPM image to an .aiot file");
  compress->add_option("input", input, "Input image (binary PGM or PPM)")->required();
  compress->add_option("output", output, "Output .aiot file")->required();
  compress_flags.attach(*compress, true);

  std::string aiot_input;
  std::string pgm_output;
  auto* decompress = app.add_subcommand("decompress", "Reconstruct a PGM image from an .aiot file");
  decompress->add_option("input", aiot_input, "Input .aiot file")->required();
  decompress->add_option("output", pgm_output, "Output PGM file")->required();

  std::string dataset;
  std::vector<std::string> variants{"standard"};
  std::vector<int> thresholds{3};
  std::string report = "report.csv";
  std::string format = "csv";
  unsigned jobs = 0;
  bool no_resources = false;
  PipelineFlags bench_flags;
  auto* bench = app.add_subcommand("bench", "Run pipelines over every image in a directory");
  bench->add_option("dataset", dataset, "Image directory")->required()->check(CLI::ExistingDirectory);
  bench->add_option("--variants", variants, "Variants to run")
      ->delimiter(',')
      ->check(CLI::IsMember({"standard", "pca", "cardinality", "optimized"}));
  bench->add_option("--thresholds", thresholds, "Decimals swept for the optimized variant")
      ->delimiter(',')
      ->check(CLI::Range(3, 6));
  bench->add_option("--report", report, "Report output path");
  bench->add_option("--format", format, "Report format")->check(CLI::IsMember({"csv", "json"}));
  bench->add_option("--jobs", jobs, "Worker threads (0 = logical cores)");
  bench->add_flag("--no-resources", no_resources, "Skip cpu/memory sampling so runs may execute in parallel");
  bench_flags.attach(*bench, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*compress) return cmd_compress(input, output, compress_flags);
    if (*decompress) return cmd_decompress(aiot_input, pgm_output);
    return cmd_bench(dataset, variants, thresholds, report, format, bench_flags, jobs, no_resources);
  } catch (const aiot::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return e.code() == aiot::ErrorCode::InvalidConfig ? kExitUsage : kExitFailure;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitFailure;
  }
}
