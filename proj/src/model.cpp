#include "aiot/model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "aiot/error.hpp"

namespace aiot {
namespace {

using u128 = unsigned __int128;

std::vector<std::int32_t> make_lookup(std::uint32_t max_symbol) {
  return std::vector<std::int32_t>(static_cast<std::size_t>(max_symbol) + 1, -1);
}

void check_symbol(std::uint32_t symbol) {
  if (symbol > kMaxSymbol) throw Error(ErrorCode::InvalidModel, "symbol " + std::to_string(symbol) + " exceeds 16 bits");
}

}  // namespace

ProbabilityModel::ProbabilityModel(std::vector<ModelEntry> entries, ModelOrder order, std::vector<Alias> aliases)
    : entries_(std::move(entries)), aliases_(std::move(aliases)), order_(order) {
  if (entries_.empty()) throw Error(ErrorCode::InvalidModel, "model has no entries");
  std::uint32_t max_symbol = 0;
  for (const auto& e : entries_) {
    check_symbol(e.symbol);
    if (e.weight == 0) throw Error(ErrorCode::InvalidModel, "zero-probability entry for symbol " + std::to_string(e.symbol));
    max_symbol = std::max(max_symbol, e.symbol);
  }
  for (const auto& [from, to] : aliases_) {
    check_symbol(from);
    max_symbol = std::max(max_symbol, from);
  }

  cumulative_.assign(entries_.size() + 1, 0);
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    if (entries_[i].weight > ~std::uint64_t{0} - cumulative_[i]) throw Error(ErrorCode::InvalidModel, "weight overflow");
    cumulative_[i + 1] = cumulative_[i] + entries_[i].weight;
  }
  total_ = cumulative_.back();

  lookup_ = make_lookup(max_symbol);
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    auto& slot = lookup_[entries_[i].symbol];
    if (slot >= 0) throw Error(ErrorCode::InvalidModel, "duplicate symbol " + std::to_string(entries_[i].symbol));
    slot = static_cast<std::int32_t>(i);
  }
  for (const auto& [from, to] : aliases_) {
    if (to >= lookup_.size() || lookup_[to] < 0 || lookup_[from] >= 0) {
      throw Error(ErrorCode::InvalidModel, "alias " + std::to_string(from) + "->" + std::to_string(to) + " is invalid");
    }
  }
  for (const auto& [from, to] : aliases_) lookup_[from] = lookup_[to];
}

double ProbabilityModel::probability(std::size_t i) const {
  return static_cast<double>(entries_[i].weight) / static_cast<double>(total_);
}

double ProbabilityModel::cumulative(std::size_t i) const {
  return static_cast<double>(cumulative_[i]) / static_cast<double>(total_);
}

std::optional<std::size_t> ProbabilityModel::find(std::uint32_t symbol) const noexcept {
  if (symbol >= lookup_.size() || lookup_[symbol] < 0) return std::nullopt;
  return static_cast<std::size_t>(lookup_[symbol]);
}

std::size_t ProbabilityModel::index_of(std::uint32_t symbol) const {
  if (auto i = find(symbol)) return *i;
  throw Error(ErrorCode::UnknownSymbol, "symbol " + std::to_string(symbol) + " not in model");
}

ProbabilityModel build_model(const SymbolSequence& seq) {
  if (seq.empty()) throw Error(ErrorCode::EmptyInput, "cannot build a model from an empty sequence");
  std::uint32_t max_symbol = 0;
  for (auto s : seq.symbols) max_symbol = std::max(max_symbol, s);
  check_symbol(max_symbol);
  std::vector<std::uint64_t> counts(static_cast<std::size_t>(max_symbol) + 1, 0);
  for (auto s : seq.symbols) ++counts[s];

  std::vector<ModelEntry> entries;
  for (std::uint32_t s = 0; s <= max_symbol; ++s) {
    if (counts[s] != 0) entries.push_back({s, counts[s]});
  }
  return ProbabilityModel(std::move(entries), ModelOrder::BySymbol);
}

SymbolProbability cumulative_of(const ProbabilityModel& model, std::uint32_t symbol) {
  const auto i = model.index_of(symbol);
  return {model.cumulative(i), model.probability(i)};
}

ProbabilityModel round_probabilities(const ProbabilityModel& model, int decimals) {
  if (decimals < 1 || decimals > 12) throw Error(ErrorCode::InvalidConfig, "decimals must be in [1, 12]");
  std::uint64_t scale = 1;
  for (int i = 0; i < decimals; ++i) scale *= 10;

  const auto& entries = model.entries();
  const u128 total = model.total();
  std::vector<std::uint64_t> rounded(entries.size());
  for (std::size_t i = 0; i < entries.size(); ++i) {
    // half-up of weight * scale / total
    const u128 num = u128{entries[i].weight} * scale * 2 + total;
    rounded[i] = static_cast<std::uint64_t>(num / (total * 2));
  }

  std::vector<std::size_t> survivors;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    if (rounded[i] != 0) survivors.push_back(i);
  }
  if (survivors.empty()) throw Error(ErrorCode::DegenerateModel, "every probability rounds to zero");

  std::vector<ModelEntry> out;
  out.reserve(survivors.size());
  for (auto i : survivors) out.push_back({entries[i].symbol, rounded[i]});

  // Absorbed entries alias onto the nearest lower-index survivor, or the first
  // survivor when nothing precedes them. Existing aliases follow their target.
  std::vector<std::uint32_t> target(entries.size());
  std::size_t next = 0;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    while (next < survivors.size() && survivors[next] <= i) ++next;
    const std::size_t survivor = next == 0 ? survivors.front() : survivors[next - 1];
    target[i] = entries[survivor].symbol;
  }
  std::vector<ProbabilityModel::Alias> aliases;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    if (rounded[i] == 0) aliases.emplace_back(entries[i].symbol, target[i]);
  }
  for (const auto& [from, to] : model.aliases()) {
    aliases.emplace_back(from, target[model.index_of(to)]);
  }
  std::sort(aliases.begin(), aliases.end());
  return ProbabilityModel(std::move(out), model.order(), std::move(aliases));
}

ProbabilityModel sort_descending(const ProbabilityModel& model) {
  auto entries = model.entries();
  std::sort(entries.begin(), entries.end(), [](const ModelEntry& a, const ModelEntry& b) {
    return a.weight != b.weight ? a.weight > b.weight : a.symbol < b.symbol;
  });
  return ProbabilityModel(std::move(entries), ModelOrder::ByProbabilityDesc, model.aliases());
}

double entropy_bits(const ProbabilityModel& model) {
  double h = 0.0;
  for (std::size_t i = 0; i < model.size(); ++i) {
    const double p = model.probability(i);
    h -= p * std::log2(p);
  }
  return h;
}

GroupedModel::GroupedModel(std::vector<SymbolGroup> groups, std::uint64_t total)
    : groups_(std::move(groups)), total_(total) {
  std::uint32_t max_symbol = 0;
  std::uint64_t sum = 0;
  for (const auto& g : groups_) {
    if (g.members.empty()) throw Error(ErrorCode::InvalidModel, "empty group");
    for (auto s : g.members) {
      check_symbol(s);
      max_symbol = std::max(max_symbol, s);
    }
    sum += g.weight;
  }
  if (groups_.empty() || sum != total_) throw Error(ErrorCode::InvalidModel, "group weights do not sum to total");
  lookup_ = make_lookup(max_symbol);
  for (std::size_t g = 0; g < groups_.size(); ++g) {
    for (auto s : groups_[g].members) {
      if (lookup_[s] >= 0) throw Error(ErrorCode::InvalidModel, "symbol in two groups");
      lookup_[s] = static_cast<std::int32_t>(g);
    }
  }
}

double GroupedModel::probability(std::size_t g) const {
  return static_cast<double>(groups_[g].weight) / static_cast<double>(total_);
}

std::size_t GroupedModel::group_of(std::uint32_t symbol) const {
  if (symbol >= lookup_.size() || lookup_[symbol] < 0) {
    throw Error(ErrorCode::UnknownSymbol, "symbol " + std::to_string(symbol) + " not in any group");
  }
  return static_cast<std::size_t>(lookup_[symbol]);
}

ProbabilityModel GroupedModel::index_model() const {
  std::vector<ModelEntry> entries;
  entries.reserve(groups_.size());
  for (std::size_t g = 0; g < groups_.size(); ++g) {
    entries.push_back({static_cast<std::uint32_t>(g), groups_[g].weight});
  }
  return ProbabilityModel(std::move(entries), ModelOrder::ByProbabilityDesc);
}

std::vector<std::uint32_t> GroupedModel::representatives() const {
  std::vector<std::uint32_t> reps;
  reps.reserve(groups_.size());
  for (const auto& g : groups_) reps.push_back(g.representative);
  return reps;
}

GroupedModel group_similar(const ProbabilityModel& sorted, double threshold, std::size_t max_group_size) {
  if (sorted.order() != ModelOrder::ByProbabilityDesc) {
    throw Error(ErrorCode::InvalidModel, "group_similar requires a probability-descending model");
  }
  if (max_group_size == 0) throw Error(ErrorCode::InvalidConfig, "group size must be positive");
  const double tolerance = threshold * static_cast<double>(sorted.total());

  std::vector<SymbolGroup> groups;
  std::vector<std::size_t> group_of_entry(sorted.size());
  std::vector<std::size_t> entry_count;
  std::uint64_t head_weight = 0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const auto& e = sorted.entries()[i];
    const auto gap = e.weight > head_weight ? e.weight - head_weight : head_weight - e.weight;
    const bool joins = !groups.empty() && static_cast<double>(gap) <= tolerance && entry_count.back() < max_group_size;
    if (!joins) {
      groups.emplace_back();
      entry_count.push_back(0);
      head_weight = e.weight;
    }
    groups.back().members.push_back(e.symbol);
    groups.back().weight += e.weight;
    ++entry_count.back();
    group_of_entry[i] = groups.size() - 1;
  }

  for (auto& g : groups) {
    u128 weighted = 0;
    for (auto s : g.members) weighted += u128{sorted.weight(sorted.index_of(s))} * s;
    const u128 den = g.weight;
    g.representative = static_cast<std::uint32_t>((weighted * 2 + den) / (den * 2));
  }
  for (const auto& [from, to] : sorted.aliases()) {
    groups[group_of_entry[sorted.index_of(to)]].members.push_back(from);
  }
  return GroupedModel(std::move(groups), sorted.total());
}

QuantizerSpec::QuantizerSpec(int levels) : levels_(levels), step_(0) {
  if (levels < 2 || levels > 256) throw Error(ErrorCode::BadLevelCount, "levels must be in [2, 256], got " + std::to_string(levels));
  step_ = (256 + levels - 1) / levels;
}

std::uint8_t QuantizerSpec::dequantize(std::uint8_t level) const {
  if (level >= levels_) throw Error(ErrorCode::LevelOutOfRange, "level " + std::to_string(level) + " >= " + std::to_string(levels_));
  return static_cast<std::uint8_t>(std::min(255, level * step_ + step_ / 2));
}

GrayImage quantize(const GrayImage& img, const QuantizerSpec& spec) {
  return img.unaryExpr([&spec](std::uint8_t p) { return spec.quantize(p); });
}

GrayImage dequantize(const GrayImage& levels, const QuantizerSpec& spec) {
  return levels.unaryExpr([&spec](std::uint8_t q) { return spec.dequantize(q); });
}

}  // namespace aiot
