#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "aiot/image.hpp"

namespace aiot {

/// Largest symbol value a model may carry (16-bit alphabet).
inline constexpr std::uint32_t kMaxSymbol = 0xFFFF;

enum class ModelOrder : std::uint8_t { BySymbol = 0, ByProbabilityDesc = 1 };

struct ModelEntry {
  std::uint32_t symbol = 0;
  std::uint64_t weight = 0;
  bool operator==(const ModelEntry&) const = default;
};

/// Static symbol model with exact rational probabilities: entry i has
/// probability weight_i / total, and the cumulative table is the prefix sum of
/// weights in entry order. Symbols dropped by probability rounding stay
/// encodable through an alias onto the entry that absorbed them.
class ProbabilityModel {
 public:
  using Alias = std::pair<std::uint32_t, std::uint32_t>;  // (absorbed symbol, target entry symbol)

  ProbabilityModel() = default;
  ProbabilityModel(std::vector<ModelEntry> entries, ModelOrder order, std::vector<Alias> aliases = {});

  [[nodiscard]] const std::vector<ModelEntry>& entries() const noexcept { return entries_; }
  [[nodiscard]] const std::vector<Alias>& aliases() const noexcept { return aliases_; }
  [[nodiscard]] ModelOrder order() const noexcept { return order_; }
  [[nodiscard]] std::size_t size() const noexcept { return entries_.size(); }
  [[nodiscard]] std::uint64_t total() const noexcept { return total_; }

  [[nodiscard]] std::uint64_t weight(std::size_t i) const { return entries_[i].weight; }
  /// Sum of weights of entries before i; cumulative_weight(size()) == total().
  [[nodiscard]] std::uint64_t cumulative_weight(std::size_t i) const { return cumulative_[i]; }
  [[nodiscard]] double probability(std::size_t i) const;
  [[nodiscard]] double cumulative(std::size_t i) const;

  /// Entry index coding `symbol`, following aliases.
  [[nodiscard]] std::optional<std::size_t> find(std::uint32_t symbol) const noexcept;
  /// As find(), throwing UnknownSymbol.
  [[nodiscard]] std::size_t index_of(std::uint32_t symbol) const;

  bool operator==(const ProbabilityModel& other) const {
    return entries_ == other.entries_ && aliases_ == other.aliases_ && order_ == other.order_;
  }

 private:
  std::vector<ModelEntry> entries_;
  std::vector<Alias> aliases_;
  std::vector<std::uint64_t> cumulative_{0};
  std::vector<std::int32_t> lookup_;
  std::uint64_t total_ = 0;
  ModelOrder order_ = ModelOrder::BySymbol;
};

struct SymbolProbability {
  double cumulative = 0.0;   // C(s)
  double probability = 0.0;  // P(s)
};

ProbabilityModel build_model(const SymbolSequence& seq);

SymbolProbability cumulative_of(const ProbabilityModel& model, std::uint32_t symbol);

/// Rounds every probability half-up to `decimals` places. Entries that round
/// to zero are absorbed by the nearest lower-index survivor (or the nearest
/// higher one for a leading run), and the survivors are renormalized exactly.
ProbabilityModel round_probabilities(const ProbabilityModel& model, int decimals);

/// Probability descending, ties by symbol ascending.
ProbabilityModel sort_descending(const ProbabilityModel& model);

/// Shannon entropy in bits per symbol.
double entropy_bits(const ProbabilityModel& model);

struct SymbolGroup {
  std::vector<std::uint32_t> members;
  std::uint64_t weight = 0;
  std::uint32_t representative = 0;
  bool operator==(const SymbolGroup&) const = default;
};

/// Partition of a model's alphabet into groups of near-equal probability.
class GroupedModel {
 public:
  GroupedModel() = default;
  GroupedModel(std::vector<SymbolGroup> groups, std::uint64_t total);

  [[nodiscard]] const std::vector<SymbolGroup>& groups() const noexcept { return groups_; }
  [[nodiscard]] std::size_t size() const noexcept { return groups_.size(); }
  [[nodiscard]] std::uint64_t total() const noexcept { return total_; }
  [[nodiscard]] double probability(std::size_t g) const;

  [[nodiscard]] std::size_t group_of(std::uint32_t symbol) const;

  /// Model over group indices 0..size()-1, the alphabet actually coded.
  [[nodiscard]] ProbabilityModel index_model() const;
  [[nodiscard]] std::vector<std::uint32_t> representatives() const;

 private:
  std::vector<SymbolGroup> groups_;
  std::vector<std::int32_t> lookup_;
  std::uint64_t total_ = 0;
};

inline constexpr std::size_t kDefaultGroupSize = 6;

/// Single left-to-right scan over a descending model: an entry joins the open
/// group when its probability is within `threshold` of the group head's and
/// the group holds fewer than `max_group_size` entries. The representative is
/// the probability-weighted mean member value, rounded half-up.
GroupedModel group_similar(const ProbabilityModel& sorted, double threshold,
                           std::size_t max_group_size = kDefaultGroupSize);

/// Uniform intensity quantizer with `levels` bins and midpoint reconstruction.
class QuantizerSpec {
 public:
  explicit QuantizerSpec(int levels = 32);

  [[nodiscard]] int levels() const noexcept { return levels_; }
  /// 256 / levels, rounded up when levels does not divide 256.
  [[nodiscard]] int step() const noexcept { return step_; }

  [[nodiscard]] std::uint8_t quantize(std::uint8_t pixel) const noexcept {
    return static_cast<std::uint8_t>(pixel / step_);
  }
  [[nodiscard]] std::uint8_t dequantize(std::uint8_t level) const;

  bool operator==(const QuantizerSpec&) const = default;

 private:
  int levels_;
  int step_;
};

GrayImage quantize(const GrayImage& img, const QuantizerSpec& spec);
GrayImage dequantize(const GrayImage& levels, const QuantizerSpec& spec);

}  // namespace aiot
