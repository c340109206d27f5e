#include "aiot/codec.hpp"

#include <algorithm>
#include <cmath>

#include "aiot/error.hpp"

namespace aiot {
namespace {

using u128 = unsigned __int128;

double ratio_approx(const mpz_class& num, const mpz_class& den) {
  long num_exp = 0;
  long den_exp = 0;
  const double n = mpz_get_d_2exp(&num_exp, num.get_mpz_t());
  const double d = mpz_get_d_2exp(&den_exp, den.get_mpz_t());
  if (d == 0.0) return 0.0;
  return std::ldexp(n / d, static_cast<int>(num_exp - den_exp));
}

// Shortest dyadic cover of [a/d, (a+w)/d).
Codeword shortest_cover(const mpz_class& a, const mpz_class& w, const mpz_class& d) {
  // m0 = smallest m with w * 2^m >= d; covers of length m0 or m0 + 1 exist.
  long m = 0;
  if (w < d) {
    const long bd = static_cast<long>(mpz_sizeinbase(d.get_mpz_t(), 2));
    const long bw = static_cast<long>(mpz_sizeinbase(w.get_mpz_t(), 2));
    m = std::max(0L, bd - bw - 1);
    while (mpz_class(w << static_cast<mp_bitcnt_t>(m)) < d) ++m;
  }
  for (;; ++m) {
    const mpz_class scaled_low = a << static_cast<mp_bitcnt_t>(m);
    mpz_class j;
    mpz_cdiv_q(j.get_mpz_t(), scaled_low.get_mpz_t(), d.get_mpz_t());
    const mpz_class scaled_high = mpz_class(a + w) << static_cast<mp_bitcnt_t>(m);
    if (mpz_class((j + 1) * d) <= scaled_high) {
      Codeword code;
      for (long i = m - 1; i >= 0; --i) code.push_back(mpz_tstbit(j.get_mpz_t(), static_cast<mp_bitcnt_t>(i)) != 0);
      return code;
    }
  }
}

}  // namespace

std::string_view to_string(Backend backend) noexcept {
  return backend == Backend::Exact ? "exact" : "renorm64";
}

Backend parse_backend(std::string_view name) {
  if (name == "exact") return Backend::Exact;
  if (name == "renorm64") return Backend::Renorm64;
  throw Error(ErrorCode::InvalidConfig, "unknown backend '" + std::string(name) + "'");
}

// ---- Codeword ----------------------------------------------------------

Codeword::Codeword(Bytes bytes, std::uint64_t bit_count) : bytes_(std::move(bytes)), bit_count_(bit_count) {
  if (bytes_.size() != (bit_count_ + 7) / 8) {
    throw Error(ErrorCode::CorruptCodeword, "payload holds " + std::to_string(bytes_.size()) + " bytes for " +
                                                std::to_string(bit_count_) + " bits");
  }
  if (bit_count_ % 8 != 0) bytes_.back() &= static_cast<std::uint8_t>(0xFF << (8 - bit_count_ % 8));
}

Codeword Codeword::from_string(std::string_view bits) {
  Codeword code;
  for (char c : bits) code.push_back(c == '1');
  return code;
}

void Codeword::push_back(bool bit) {
  if ((bit_count_ & 7) == 0) bytes_.push_back(0);
  if (bit) bytes_.back() |= static_cast<std::uint8_t>(0x80u >> (bit_count_ & 7));
  ++bit_count_;
}

std::string Codeword::to_string() const {
  std::string s;
  s.reserve(bit_count_);
  for (std::uint64_t i = 0; i < bit_count_; ++i) s.push_back(bit(i) ? '1' : '0');
  return s;
}

// ---- Exact backend -----------------------------------------------------

mpq_class ExactState::low() const {
  mpq_class q(low_num_, denom_);
  q.canonicalize();
  return q;
}

mpq_class ExactState::high() const {
  mpq_class q(low_num_ + width_num_, denom_);
  q.canonicalize();
  return q;
}

mpq_class ExactState::width() const {
  mpq_class q(width_num_, denom_);
  q.canonicalize();
  return q;
}

double ExactState::width_approx() const { return ratio_approx(width_num_, denom_); }

void ExactState::step(const ProbabilityModel& model, std::size_t entry) {
  const std::uint64_t weight = model.weight(entry);
  const std::uint64_t total = model.total();
  if (weight == total) return;  // certain symbol: interval unchanged
  const std::uint64_t cum = model.cumulative_weight(entry);
  // low' = (low * T + width * C) / (denom * T), width' = width * P / (denom * T)
  low_num_ *= total;
  if (cum != 0) mpz_addmul_ui(low_num_.get_mpz_t(), width_num_.get_mpz_t(), cum);
  width_num_ *= weight;
  denom_ *= total;
}

ExactState encode_step(ExactState state, std::uint32_t symbol, const ProbabilityModel& model) {
  state.step(model, model.index_of(symbol));
  return state;
}

Codeword select_codeword(const mpq_class& low, const mpq_class& high) {
  if (low < 0 || high > 1 || !(low < high)) {
    throw Error(ErrorCode::InvalidConfig, "select_codeword needs 0 <= low < high <= 1");
  }
  const mpz_class d = low.get_den() * high.get_den();
  const mpz_class a = low.get_num() * high.get_den();
  const mpz_class w = high.get_num() * low.get_den() - a;
  return shortest_cover(a, w, d);
}

Codeword select_codeword(const ExactState& state) {
  return shortest_cover(state.low_num(), state.width_num(), state.denom());
}

namespace {

std::vector<std::uint32_t> decode_exact(const Codeword& code, const ProbabilityModel& model, std::uint64_t n) {
  std::vector<std::uint32_t> out;
  out.reserve(n);
  if (model.size() == 1) {
    out.assign(n, model.entries().front().symbol);
    return out;
  }
  // Relative position r = num / den of the code value inside the current interval.
  mpz_class num = 0;
  for (std::uint64_t i = 0; i < code.size(); ++i) {
    if (code.bit(i)) mpz_setbit(num.get_mpz_t(), static_cast<mp_bitcnt_t>(code.size() - 1 - i));
  }
  mpz_class den = 1;
  den <<= static_cast<mp_bitcnt_t>(code.size());

  const std::uint64_t total = model.total();
  mpz_class scaled;
  mpz_class target;
  for (std::uint64_t k = 0; k < n; ++k) {
    scaled = num * total;
    mpz_fdiv_q(target.get_mpz_t(), scaled.get_mpz_t(), den.get_mpz_t());
    if (!target.fits_ulong_p() || target.get_ui() >= total) {
      throw Error(ErrorCode::CorruptCodeword, "code value left the unit interval at symbol " + std::to_string(k));
    }
    const std::uint64_t t = target.get_ui();
    std::size_t lo = 0;
    std::size_t hi = model.size();
    while (hi - lo > 1) {
      const std::size_t mid = (lo + hi) / 2;
      if (model.cumulative_weight(mid) <= t) lo = mid; else hi = mid;
    }
    out.push_back(model.entries()[lo].symbol);
    // r' = (r * T - C) / P
    scaled -= den * model.cumulative_weight(lo);
    num.swap(scaled);
    den *= model.weight(lo);
  }
  return out;
}

}  // namespace

// ---- Renorm64 backend --------------------------------------------------

FrequencyTable::FrequencyTable(const ProbabilityModel& model) {
  const std::size_t n = model.size();
  std::vector<std::uint64_t> freq(n);
  std::uint64_t sum = 0;
  std::size_t largest = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const u128 scaled = (u128{model.weight(i)} << kTotalBits) / model.total();
    freq[i] = std::max<std::uint64_t>(1, static_cast<std::uint64_t>(scaled));
    sum += freq[i];
    if (freq[i] > freq[largest]) largest = i;
  }
  if (sum > kTotal) {
    const std::uint64_t excess = sum - kTotal;
    if (freq[largest] <= excess) throw Error(ErrorCode::PrecisionExhausted, "alphabet too large for 32-bit frequencies");
    freq[largest] -= excess;
  } else {
    freq[largest] += kTotal - sum;
  }
  cumulative_.assign(n + 1, 0);
  for (std::size_t i = 0; i < n; ++i) cumulative_[i + 1] = cumulative_[i] + freq[i];
}

std::size_t FrequencyTable::find(std::uint64_t target) const noexcept {
  const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end() - 1, target);
  return static_cast<std::size_t>(it - cumulative_.begin()) - 1;
}

void Renorm64Encoder::emit(bool bit) {
  out_.push_back(bit);
  for (; pending_ > 0; --pending_) out_.push_back(!bit);
}

void Renorm64Encoder::step(const FrequencyTable& table, std::size_t entry) {
  const u128 range = high_ - low_;
  const std::uint64_t new_low = low_ + static_cast<std::uint64_t>((range * table.low(entry)) >> FrequencyTable::kTotalBits);
  const std::uint64_t new_high = low_ + static_cast<std::uint64_t>((range * table.high(entry)) >> FrequencyTable::kTotalBits);
  if (new_high <= new_low) throw Error(ErrorCode::PrecisionExhausted, "interval collapsed in 62-bit register");
  low_ = new_low;
  high_ = new_high;
  for (;;) {
    if (high_ <= kHalf) {
      emit(false);
    } else if (low_ >= kHalf) {
      emit(true);
      low_ -= kHalf;
      high_ -= kHalf;
    } else if (low_ >= kQuarter && high_ <= kHalf + kQuarter) {
      ++pending_;
      low_ -= kQuarter;
      high_ -= kQuarter;
    } else {
      break;
    }
    low_ <<= 1;
    high_ <<= 1;
  }
}

Codeword Renorm64Encoder::finish() {
  // Shortest aligned block [j, j + 1) * 2^(62 - m) inside [low, high). With
  // pending bits outstanding at least one bit must be written to resolve them.
  for (int m = pending_ > 0 ? 1 : 0; m <= kPrecision; ++m) {
    const int shift = kPrecision - m;
    const u128 block = u128{1} << shift;
    const u128 j = (u128{low_} + block - 1) >> shift;
    if (((j + 1) << shift) <= high_) {
      for (int i = m - 1; i >= 0; --i) emit(((j >> i) & 1) != 0);
      break;
    }
  }
  Codeword code = std::move(out_);
  *this = Renorm64Encoder{};
  return code;
}

double Renorm64Encoder::width_approx() const noexcept {
  const auto scale = static_cast<int>(-kPrecision - static_cast<long>(std::min<std::uint64_t>(out_.size() + pending_, 1u << 20)));
  return std::ldexp(static_cast<double>(high_ - low_), scale);
}

Renorm64Decoder::Renorm64Decoder(const Codeword& code) : code_(code) {
  for (int i = 0; i < Renorm64Encoder::kPrecision; ++i) value_ = (value_ << 1) | (read_bit() ? 1u : 0u);
}

std::size_t Renorm64Decoder::next(const FrequencyTable& table) {
  constexpr auto kHalf = Renorm64Encoder::kHalf;
  constexpr auto kQuarter = Renorm64Encoder::kQuarter;
  if (value_ < low_ || value_ >= high_) throw Error(ErrorCode::CorruptCodeword, "code value outside coder interval");
  const u128 range = high_ - low_;
  const u128 target = ((u128{value_ - low_ + 1} << FrequencyTable::kTotalBits) - 1) / range;
  if (target >= FrequencyTable::kTotal) throw Error(ErrorCode::CorruptCodeword, "frequency target out of range");
  const std::size_t entry = table.find(static_cast<std::uint64_t>(target));

  const std::uint64_t base = low_;
  low_ = base + static_cast<std::uint64_t>((range * table.low(entry)) >> FrequencyTable::kTotalBits);
  high_ = base + static_cast<std::uint64_t>((range * table.high(entry)) >> FrequencyTable::kTotalBits);
  for (;;) {
    if (high_ <= kHalf) {
    } else if (low_ >= kHalf) {
      low_ -= kHalf;
      high_ -= kHalf;
      value_ -= kHalf;
    } else if (low_ >= kQuarter && high_ <= kHalf + kQuarter) {
      low_ -= kQuarter;
      high_ -= kQuarter;
      value_ -= kQuarter;
    } else {
      break;
    }
    low_ <<= 1;
    high_ <<= 1;
    value_ = (value_ << 1) | (read_bit() ? 1u : 0u);
  }
  return entry;
}

// ---- Sequence-level API -------------------------------------------------

namespace {

template <typename IndexOf>
EncodeResult encode_indices(std::size_t count, IndexOf index_of, const ProbabilityModel& model, Backend backend,
                            const StepFilter& skip) {
  EncodeResult result;
  if (backend == Backend::Exact) {
    ExactState state;
    for (std::size_t i = 0; i < count; ++i) {
      const std::size_t entry = index_of(i);
      if (skip && i > 0 && model.weight(entry) == model.total() && skip(state.width_approx(), 1.0)) continue;
      state.step(model, entry);
      ++result.iterations;
    }
    result.code = select_codeword(state);
  } else {
    const FrequencyTable table(model);
    Renorm64Encoder encoder;
    for (std::size_t i = 0; i < count; ++i) {
      const std::size_t entry = index_of(i);
      if (skip && i > 0 && model.weight(entry) == model.total() && skip(encoder.width_approx(), 1.0)) continue;
      encoder.step(table, entry);
      ++result.iterations;
    }
    result.code = encoder.finish();
  }
  return result;
}

std::vector<std::size_t> decode_indices(const Codeword& code, const ProbabilityModel& model, std::uint64_t n,
                                        Backend backend) {
  std::vector<std::size_t> entries;
  entries.reserve(n);
  if (backend == Backend::Exact) {
    for (auto s : decode_exact(code, model, n)) entries.push_back(model.index_of(s));
    return entries;
  }
  const FrequencyTable table(model);
  Renorm64Decoder decoder(code);
  for (std::uint64_t k = 0; k < n; ++k) entries.push_back(decoder.next(table));
  return entries;
}

}  // namespace

EncodeResult encode(std::span<const std::uint32_t> symbols, const ProbabilityModel& model, Backend backend,
                    const StepFilter& skip) {
  return encode_indices(symbols.size(), [&](std::size_t i) { return model.index_of(symbols[i]); }, model, backend, skip);
}

EncodeResult encode(std::span<const std::uint32_t> symbols, const GroupedModel& model, Backend backend,
                    const StepFilter& skip) {
  const auto index_model = model.index_model();
  return encode_indices(symbols.size(), [&](std::size_t i) { return model.group_of(symbols[i]); }, index_model, backend,
                        skip);
}

std::vector<std::uint32_t> decode(const Codeword& code, const ProbabilityModel& model, std::uint64_t n_symbols,
                                  Backend backend) {
  if (backend == Backend::Exact) return decode_exact(code, model, n_symbols);
  std::vector<std::uint32_t> out;
  out.reserve(n_symbols);
  for (auto entry : decode_indices(code, model, n_symbols, backend)) out.push_back(model.entries()[entry].symbol);
  return out;
}

std::vector<std::uint32_t> decode(const Codeword& code, const GroupedModel& model, std::uint64_t n_symbols,
                                  Backend backend) {
  const auto reps = model.representatives();
  std::vector<std::uint32_t> out;
  out.reserve(n_symbols);
  for (auto entry : decode_indices(code, model.index_model(), n_symbols, backend)) out.push_back(reps[entry]);
  return out;
}

}  // namespace aiot
