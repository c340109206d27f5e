#include "aiot/pipeline.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "aiot/error.hpp"

namespace aiot {
namespace {

void fill_payload(CompressedArtifact& artifact, const Codeword& code) {
  artifact.payload = code.bytes();
  artifact.payload_bits = code.size();
}

CompressedArtifact make_artifact(const GrayImage& img, const PipelineConfig& cfg) {
  CompressedArtifact a;
  a.variant = cfg.variant;
  a.backend = cfg.backend;
  a.width = static_cast<std::uint32_t>(img.cols());
  a.height = static_cast<std::uint32_t>(img.rows());
  return a;
}

CompressResult compress_standard(const GrayImage& img, const PipelineConfig& cfg) {
  CompressResult r{make_artifact(img, cfg), {}};
  const auto seq = flatten(img);
  r.artifact.model = build_model(seq);
  r.artifact.n_symbols = seq.size();
  auto encoded = encode(seq.symbols, r.artifact.model, cfg.backend);
  fill_payload(r.artifact, encoded.code);
  r.trace.iterations = encoded.iterations;
  return r;
}

CompressResult compress_cardinality(const GrayImage& img, const PipelineConfig& cfg) {
  const QuantizerSpec spec(cfg.levels);
  CompressResult r{make_artifact(img, cfg), {}};
  r.artifact.levels = static_cast<std::uint16_t>(spec.levels());
  auto seq = flatten(quantize(img, spec));
  seq.alphabet_bound = static_cast<std::uint32_t>(spec.levels());
  r.artifact.model = build_model(seq);
  r.artifact.n_symbols = seq.size();
  auto encoded = encode(seq.symbols, r.artifact.model, cfg.backend);
  fill_payload(r.artifact, encoded.code);
  r.trace.iterations = encoded.iterations;
  return r;
}

CompressResult compress_pca(const GrayImage& img, const PipelineConfig& cfg) {
  CompressResult r{make_artifact(img, cfg), {}};
  auto [basis, block] = fit_project(img, cfg.retain);
  quantize_scores(block, kDefaultScoreBits);

  auto& section = r.artifact.pca;
  section.k = static_cast<std::uint32_t>(basis.k());
  section.score_bits = static_cast<std::uint8_t>(block.bits);
  section.mean.assign(basis.mean.data(), basis.mean.data() + basis.mean.size());
  const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> components = basis.components;
  section.components.assign(components.data(), components.data() + components.size());
  section.score_min.assign(block.min.data(), block.min.data() + block.min.size());
  section.score_max.assign(block.max.data(), block.max.data() + block.max.size());
  r.artifact.retain = cfg.retain;

  SymbolSequence seq;
  seq.alphabet_bound = 1u << block.bits;
  seq.symbols.assign(block.quantized.data(), block.quantized.data() + block.quantized.size());
  r.artifact.model = build_model(seq);
  r.artifact.n_symbols = seq.size();
  auto encoded = encode(seq.symbols, r.artifact.model, cfg.backend);
  fill_payload(r.artifact, encoded.code);
  r.trace.iterations = encoded.iterations;
  return r;
}

CompressResult compress_optimized(const GrayImage& img, const PipelineConfig& cfg) {
  CompressResult r{make_artifact(img, cfg), {}};
  r.artifact.decimals = static_cast<std::uint8_t>(cfg.decimals);
  r.artifact.group_size = static_cast<std::uint8_t>(cfg.group_size);

  const auto seq = flatten(img);
  const auto base = build_model(seq);
  const auto rounded = round_probabilities(base, cfg.decimals);
  const auto sorted = sort_descending(rounded);
  const double threshold = std::pow(10.0, -cfg.decimals);
  const auto grouped = group_similar(sorted, threshold, cfg.group_size);

  r.trace.objective_history = {entropy_bits(base), entropy_bits(rounded), entropy_bits(grouped.index_model())};
  r.artifact.model = grouped.index_model();
  for (auto rep : grouped.representatives()) r.artifact.representatives.push_back(static_cast<std::uint8_t>(rep));
  r.artifact.n_symbols = seq.size();

  const int decimals = cfg.decimals;
  auto encoded = encode(seq.symbols, grouped, cfg.backend,
                        [decimals](double width, double p) { return check_stop(width, p, decimals); });
  fill_payload(r.artifact, encoded.code);
  r.trace.iterations = encoded.iterations;
  r.trace.converged_by_threshold = encoded.iterations < seq.size();
  return r;
}

void require_symbols(const CompressedArtifact& a, std::uint64_t expected) {
  if (a.n_symbols != expected) {
    throw Error(ErrorCode::DimensionMismatch, "header records " + std::to_string(a.n_symbols) + " symbols, dimensions imply " +
                                                  std::to_string(expected));
  }
}

}  // namespace

void PipelineConfig::validate() const {
  switch (variant) {
    case Variant::Standard: break;
    case Variant::Pca:
      if (!(retain > 0.0 && retain <= 1.0)) throw Error(ErrorCode::InvalidConfig, "retain must be in (0, 1]");
      break;
    case Variant::Cardinality:
      if (levels < 2 || levels > 256) throw Error(ErrorCode::InvalidConfig, "levels must be in [2, 256]");
      break;
    case Variant::Optimized:
      if (decimals < 3 || decimals > 6) throw Error(ErrorCode::InvalidConfig, "decimals must be in [3, 6]");
      if (group_size < 1 || group_size > 255) throw Error(ErrorCode::InvalidConfig, "group size must be in [1, 255]");
      break;
  }
}

std::string PipelineConfig::params_string() const {
  std::ostringstream out;
  switch (variant) {
    case Variant::Standard: break;
    case Variant::Pca: out << "retain=" << retain << ';'; break;
    case Variant::Cardinality: out << "levels=" << levels << ';'; break;
    case Variant::Optimized: out << "decimals=" << decimals << ";group_size=" << group_size << ';'; break;
  }
  out << "backend=" << to_string(backend);
  return out.str();
}

bool check_stop(double width, double probability, int decimals) {
  const double change = width * (1.0 - probability);
  return probability == 1.0 && change < 0.5 * std::pow(10.0, -decimals);
}

CompressResult compress(const GrayImage& img, const PipelineConfig& cfg) {
  cfg.validate();
  if (img.size() == 0) throw Error(ErrorCode::EmptyInput, "image has no pixels");
  switch (cfg.variant) {
    case Variant::Standard: return compress_standard(img, cfg);
    case Variant::Pca: return compress_pca(img, cfg);
    case Variant::Cardinality: return compress_cardinality(img, cfg);
    case Variant::Optimized: return compress_optimized(img, cfg);
  }
  throw Error(ErrorCode::InvalidVariantTag, "unknown variant");
}

GrayImage decompress(const CompressedArtifact& a) {
  if (a.version != kFormatVersion) throw Error(ErrorCode::UnsupportedVersion, "version " + std::to_string(a.version));
  const Codeword code(a.payload, a.payload_bits);
  const auto w = static_cast<Eigen::Index>(a.width);
  const auto h = static_cast<Eigen::Index>(a.height);
  const std::uint64_t pixels = std::uint64_t{a.width} * a.height;

  switch (a.variant) {
    case Variant::Standard: {
      require_symbols(a, pixels);
      return unflatten(decode(code, a.model, a.n_symbols, a.backend), w, h);
    }
    case Variant::Cardinality: {
      require_symbols(a, pixels);
      const QuantizerSpec spec(a.levels);
      return dequantize(unflatten(decode(code, a.model, a.n_symbols, a.backend), w, h), spec);
    }
    case Variant::Optimized: {
      require_symbols(a, pixels);
      if (a.representatives.size() != a.model.size()) {
        throw Error(ErrorCode::InvalidModel, "representative count differs from model size");
      }
      auto symbols = decode(code, a.model, a.n_symbols, a.backend);
      for (auto& s : symbols) s = a.representatives.at(s);
      return unflatten(symbols, w, h);
    }
    case Variant::Pca: {
      const auto k = static_cast<Eigen::Index>(a.pca.k);
      require_symbols(a, std::uint64_t{a.height} * a.pca.k);
      if (a.pca.mean.size() != a.width || a.pca.components.size() != a.pca.k * std::size_t{a.width} ||
          a.pca.score_min.size() != a.pca.k || a.pca.score_max.size() != a.pca.k) {
        throw Error(ErrorCode::DimensionMismatch, "PCA section sizes disagree with the header");
      }
      PcaBasis<double> basis;
      basis.mean = Eigen::Map<const Eigen::RowVectorXd>(a.pca.mean.data(), w);
      basis.components = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
          a.pca.components.data(), k, w);
      basis.retain_fraction = a.retain;

      ScoreBlock<double> block;
      block.bits = a.pca.score_bits;
      block.min = Eigen::Map<const Eigen::RowVectorXd>(a.pca.score_min.data(), k);
      block.max = Eigen::Map<const Eigen::RowVectorXd>(a.pca.score_max.data(), k);
      block.quantized.resize(h, k);
      const auto symbols = decode(code, a.model, a.n_symbols, a.backend);
      for (std::size_t i = 0; i < symbols.size(); ++i) {
        if (symbols[i] >= (1u << block.bits)) throw Error(ErrorCode::CorruptCodeword, "score symbol out of range");
        block.quantized.data()[i] = static_cast<std::uint16_t>(symbols[i]);
      }
      return reconstruct(basis, dequantize_scores(block));
    }
  }
  throw Error(ErrorCode::InvalidVariantTag, "unknown variant");
}

RunResult run(const GrayImage& img, const PipelineConfig& cfg) {
  auto compressed = compress(img, cfg);
  auto reconstruction = decompress(compressed.artifact);
  return {std::move(compressed.artifact), std::move(reconstruction), std::move(compressed.trace)};
}

RunResult run_standard(const GrayImage& img, PipelineConfig cfg) {
  cfg.variant = Variant::Standard;
  return run(img, cfg);
}

RunResult run_pca(const GrayImage& img, PipelineConfig cfg) {
  cfg.variant = Variant::Pca;
  return run(img, cfg);
}

RunResult run_cardinality(const GrayImage& img, PipelineConfig cfg) {
  cfg.variant = Variant::Cardinality;
  return run(img, cfg);
}

RunResult run_optimized(const GrayImage& img, PipelineConfig cfg) {
  cfg.variant = Variant::Optimized;
  return run(img, cfg);
}

}  // namespace aiot
