#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <gmpxx.h>

#include "aiot/image.hpp"
#include "aiot/model.hpp"

namespace aiot {

enum class Backend : std::uint8_t { Exact = 0, Renorm64 = 1 };

std::string_view to_string(Backend backend) noexcept;
Backend parse_backend(std::string_view name);

/// Bit string packed MSB-first; trailing pad bits of the last byte are zero.
class Codeword {
 public:
  Codeword() = default;
  Codeword(Bytes bytes, std::uint64_t bit_count);
  static Codeword from_string(std::string_view bits);

  void push_back(bool bit);
  [[nodiscard]] bool bit(std::uint64_t i) const noexcept {
    return i < bit_count_ && ((bytes_[i >> 3] >> (7 - (i & 7))) & 1u) != 0;
  }
  [[nodiscard]] std::uint64_t size() const noexcept { return bit_count_; }
  [[nodiscard]] const Bytes& bytes() const noexcept { return bytes_; }
  [[nodiscard]] std::string to_string() const;

  bool operator==(const Codeword&) const = default;

 private:
  Bytes bytes_;
  std::uint64_t bit_count_ = 0;
};

/// Exact coder interval [low, low + width) with low = low_num / denom and
/// width = width_num / denom. Starts at [0, 1).
class ExactState {
 public:
  ExactState() = default;

  [[nodiscard]] mpq_class low() const;
  [[nodiscard]] mpq_class high() const;
  [[nodiscard]] mpq_class width() const;
  [[nodiscard]] double width_approx() const;

  [[nodiscard]] const mpz_class& low_num() const noexcept { return low_num_; }
  [[nodiscard]] const mpz_class& width_num() const noexcept { return width_num_; }
  [[nodiscard]] const mpz_class& denom() const noexcept { return denom_; }

  void step(const ProbabilityModel& model, std::size_t entry);

 private:
  mpz_class low_num_{0};
  mpz_class width_num_{1};
  mpz_class denom_{1};
};

/// Narrows the interval to the sub-range of `symbol`:
///   low'  = low + (high - low) * C(s)
///   high' = low + (high - low) * (C(s) + P(s))
ExactState encode_step(ExactState state, std::uint32_t symbol, const ProbabilityModel& model);

/// Shortest bit string b whose dyadic interval [0.b, 0.b + 2^-|b|) lies
/// inside [low, high).
Codeword select_codeword(const mpq_class& low, const mpq_class& high);
Codeword select_codeword(const ExactState& state);

/// Model probabilities re-expressed as integer frequencies summing to 2^32,
/// every entry at least 1.
class FrequencyTable {
 public:
  static constexpr int kTotalBits = 32;
  static constexpr std::uint64_t kTotal = std::uint64_t{1} << kTotalBits;

  explicit FrequencyTable(const ProbabilityModel& model);

  [[nodiscard]] std::size_t size() const noexcept { return cumulative_.size() - 1; }
  [[nodiscard]] std::uint64_t low(std::size_t i) const noexcept { return cumulative_[i]; }
  [[nodiscard]] std::uint64_t high(std::size_t i) const noexcept { return cumulative_[i + 1]; }
  [[nodiscard]] std::size_t find(std::uint64_t target) const noexcept;

 private:
  std::vector<std::uint64_t> cumulative_;
};

/// Binary arithmetic coder on 62-bit registers with carry-free renormalization
/// (settled bits are emitted, straddling expansions are deferred as pending
/// bits).
class Renorm64Encoder {
 public:
  static constexpr int kPrecision = 62;
  static constexpr std::uint64_t kFull = std::uint64_t{1} << kPrecision;
  static constexpr std::uint64_t kHalf = kFull >> 1;
  static constexpr std::uint64_t kQuarter = kFull >> 2;

  void step(const FrequencyTable& table, std::size_t entry);
  /// Appends the shortest terminating suffix and returns the codeword.
  Codeword finish();

  [[nodiscard]] std::uint64_t low() const noexcept { return low_; }
  [[nodiscard]] std::uint64_t high() const noexcept { return high_; }
  [[nodiscard]] std::uint64_t pending_bits() const noexcept { return pending_; }
  [[nodiscard]] std::uint64_t emitted_bits() const noexcept { return out_.size(); }
  /// Absolute interval width (underflows to 0 for long inputs).
  [[nodiscard]] double width_approx() const noexcept;

 private:
  void emit(bool bit);

  std::uint64_t low_ = 0;
  std::uint64_t high_ = kFull;  // exclusive
  std::uint64_t pending_ = 0;
  Codeword out_;
};

class Renorm64Decoder {
 public:
  Renorm64Decoder(const Codeword& code);
  std::size_t next(const FrequencyTable& table);

 private:
  bool read_bit() noexcept { return code_.bit(pos_++); }

  const Codeword& code_;
  std::uint64_t pos_ = 0;
  std::uint64_t low_ = 0;
  std::uint64_t high_ = Renorm64Encoder::kFull;
  std::uint64_t value_ = 0;
};

/// Decides whether a coding step may be skipped, given the current interval
/// width and the symbol's probability. Only consulted for certain symbols
/// (probability 1), whose steps leave the interval unchanged, and never for
/// the first symbol. Skipped steps are not counted as iterations.
using StepFilter = std::function<bool(double width, double probability)>;

struct EncodeResult {
  Codeword code;
  std::uint64_t iterations = 0;
};

EncodeResult encode(std::span<const std::uint32_t> symbols, const ProbabilityModel& model, Backend backend,
                    const StepFilter& skip = {});
/// Codes the group index of every symbol.
EncodeResult encode(std::span<const std::uint32_t> symbols, const GroupedModel& model, Backend backend,
                    const StepFilter& skip = {});

std::vector<std::uint32_t> decode(const Codeword& code, const ProbabilityModel& model, std::uint64_t n_symbols,
                                  Backend backend);
/// Decodes group indices and substitutes each group's representative.
std::vector<std::uint32_t> decode(const Codeword& code, const GroupedModel& model, std::uint64_t n_symbols,
                                  Backend backend);

}  // namespace aiot
