#include "aiot/container.hpp"

#include <algorithm>
#include <bit>
#include <limits>
#include <string>

#include "aiot/error.hpp"

namespace aiot {
namespace {

class Writer {
 public:
  template <typename T>
  void put(T value) {
    using U = std::make_unsigned_t<T>;
    auto u = static_cast<U>(value);
    for (std::size_t i = 0; i < sizeof(T); ++i) {
      out_.push_back(static_cast<std::uint8_t>(u & 0xFF));
      if constexpr (sizeof(T) > 1) u >>= 8;
    }
  }
  void put_f64(double v) { put(std::bit_cast<std::uint64_t>(v)); }
  void put_bytes(std::span<const std::uint8_t> bytes) { out_.insert(out_.end(), bytes.begin(), bytes.end()); }

  Bytes take() { return std::move(out_); }

 private:
  Bytes out_;
};

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  void section(const char* name) noexcept { section_ = name; }

  template <typename T>
  T get() {
    need(sizeof(T));
    std::make_unsigned_t<T> u = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i) {
      u |= static_cast<std::make_unsigned_t<T>>(static_cast<std::make_unsigned_t<T>>(bytes_[pos_ + i]) << (8 * i));
    }
    pos_ += sizeof(T);
    return static_cast<T>(u);
  }
  double get_f64() { return std::bit_cast<double>(get<std::uint64_t>()); }

  std::vector<double> get_f64s(std::uint64_t count) {
    if (count > remaining() / 8) need(std::numeric_limits<std::size_t>::max());
    std::vector<double> out(count);
    for (auto& v : out) v = get_f64();
    return out;
  }

  Bytes get_bytes(std::uint64_t count) {
    if (count > remaining()) need(std::numeric_limits<std::size_t>::max());
    Bytes out(bytes_.begin() + static_cast<std::ptrdiff_t>(pos_), bytes_.begin() + static_cast<std::ptrdiff_t>(pos_ + count));
    pos_ += count;
    return out;
  }

  [[nodiscard]] std::size_t remaining() const noexcept { return bytes_.size() - pos_; }

  [[noreturn]] void fail(ErrorCode code, const std::string& what) const {
    throw Error(code, std::string(section_) + " section: " + what);
  }

 private:
  void need(std::size_t n) const {
    if (n > remaining()) fail(ErrorCode::TruncatedSection, "file ends early");
  }

  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
  const char* section_ = "header";
};

}  // namespace

std::string_view to_string(Variant variant) noexcept {
  switch (variant) {
    case Variant::Standard: return "standard";
    case Variant::Pca: return "pca";
    case Variant::Cardinality: return "cardinality";
    case Variant::Optimized: return "optimized";
  }
  return "unknown";
}

Variant parse_variant(std::string_view name) {
  for (auto v : {Variant::Standard, Variant::Pca, Variant::Cardinality, Variant::Optimized}) {
    if (to_string(v) == name) return v;
  }
  throw Error(ErrorCode::InvalidConfig, "unknown variant '" + std::string(name) + "'");
}

Bytes serialize(const CompressedArtifact& a) {
  Writer w;
  w.put_bytes(kMagic);
  w.put(a.version);
  w.put(static_cast<std::uint8_t>(a.variant));
  w.put(a.width);
  w.put(a.height);
  w.put(a.n_symbols);

  w.put(static_cast<std::uint8_t>(a.backend));
  switch (a.variant) {
    case Variant::Standard: break;
    case Variant::Pca:
      w.put_f64(a.retain);
      w.put(a.pca.score_bits);
      break;
    case Variant::Cardinality: w.put(a.levels); break;
    case Variant::Optimized:
      w.put(a.decimals);
      w.put(a.group_size);
      break;
  }

  if (!a.model.aliases().empty()) throw Error(ErrorCode::InvalidModel, "aliased models are not serializable");
  w.put(static_cast<std::uint8_t>(a.model.order()));
  w.put(static_cast<std::uint32_t>(a.model.size()));
  w.put(a.model.total());
  for (const auto& e : a.model.entries()) {
    if (e.weight > std::numeric_limits<std::uint32_t>::max()) {
      throw Error(ErrorCode::InvalidModel, "weight exceeds 32 bits");
    }
    w.put(static_cast<std::uint16_t>(e.symbol));
    w.put(static_cast<std::uint32_t>(e.weight));
  }

  if (a.variant == Variant::Optimized) {
    w.put(static_cast<std::uint32_t>(a.representatives.size()));
    w.put_bytes(a.representatives);
  } else if (a.variant == Variant::Pca) {
    w.put(a.pca.k);
    for (double v : a.pca.mean) w.put_f64(v);
    for (double v : a.pca.components) w.put_f64(v);
    for (double v : a.pca.score_min) w.put_f64(v);
    for (double v : a.pca.score_max) w.put_f64(v);
  }

  w.put(a.payload_bits);
  w.put_bytes(a.payload);
  return w.take();
}

CompressedArtifact deserialize(std::span<const std::uint8_t> bytes) {
  Reader r(bytes);
  CompressedArtifact a;

  r.section("header");
  if (bytes.size() < kMagic.size() || !std::equal(kMagic.begin(), kMagic.end(), bytes.begin())) {
    throw Error(ErrorCode::BadMagic, "header section: missing AIOT magic");
  }
  r.get_bytes(kMagic.size());
  a.version = r.get<std::uint8_t>();
  if (a.version != kFormatVersion) {
    r.fail(ErrorCode::UnsupportedVersion, "version " + std::to_string(a.version));
  }
  const auto variant = r.get<std::uint8_t>();
  if (variant > static_cast<std::uint8_t>(Variant::Optimized)) {
    r.fail(ErrorCode::InvalidVariantTag, "variant tag " + std::to_string(variant));
  }
  a.variant = static_cast<Variant>(variant);
  a.width = r.get<std::uint32_t>();
  a.height = r.get<std::uint32_t>();
  a.n_symbols = r.get<std::uint64_t>();

  r.section("params");
  const auto backend = r.get<std::uint8_t>();
  if (backend > static_cast<std::uint8_t>(Backend::Renorm64)) r.fail(ErrorCode::InvalidConfig, "backend tag " + std::to_string(backend));
  a.backend = static_cast<Backend>(backend);
  switch (a.variant) {
    case Variant::Standard: break;
    case Variant::Pca:
      a.retain = r.get_f64();
      a.pca.score_bits = r.get<std::uint8_t>();
      break;
    case Variant::Cardinality: a.levels = r.get<std::uint16_t>(); break;
    case Variant::Optimized:
      a.decimals = r.get<std::uint8_t>();
      a.group_size = r.get<std::uint8_t>();
      break;
  }

  r.section("model");
  const auto order = r.get<std::uint8_t>();
  if (order > static_cast<std::uint8_t>(ModelOrder::ByProbabilityDesc)) r.fail(ErrorCode::InvalidModel, "order tag");
  const auto count = r.get<std::uint32_t>();
  const auto total = r.get<std::uint64_t>();
  if (count > r.remaining() / 6) r.fail(ErrorCode::TruncatedSection, "file ends early");
  std::vector<ModelEntry> entries(count);
  for (auto& e : entries) {
    e.symbol = r.get<std::uint16_t>();
    e.weight = r.get<std::uint32_t>();
  }
  try {
    a.model = ProbabilityModel(std::move(entries), static_cast<ModelOrder>(order));
  } catch (const Error& e) {
    r.fail(ErrorCode::InvalidModel, e.what());
  }
  if (a.model.total() != total) r.fail(ErrorCode::InvalidModel, "weights do not sum to the recorded total");

  r.section("reconstruction");
  if (a.variant == Variant::Optimized) {
    const auto reps = r.get<std::uint32_t>();
    if (reps != a.model.size()) r.fail(ErrorCode::InvalidModel, "representative count differs from model size");
    a.representatives = r.get_bytes(reps);
  } else if (a.variant == Variant::Pca) {
    a.pca.k = r.get<std::uint32_t>();
    a.pca.mean = r.get_f64s(a.width);
    a.pca.components = r.get_f64s(std::uint64_t{a.pca.k} * a.width);
    a.pca.score_min = r.get_f64s(a.pca.k);
    a.pca.score_max = r.get_f64s(a.pca.k);
  }

  r.section("payload");
  a.payload_bits = r.get<std::uint64_t>();
  if (a.payload_bits / 8 > r.remaining()) r.fail(ErrorCode::TruncatedSection, "file ends early");
  const auto payload_bytes = a.payload_bytes();
  if (payload_bytes > r.remaining()) r.fail(ErrorCode::TruncatedSection, "file ends early");
  a.payload = r.get_bytes(payload_bytes);
  if (r.remaining() != 0) r.fail(ErrorCode::TrailingData, std::to_string(r.remaining()) + " bytes after payload");
  return a;
}

}  // namespace aiot
