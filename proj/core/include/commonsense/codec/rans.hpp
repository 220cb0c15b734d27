#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace commonsense::codec {

inline constexpr unsigned kDefaultQuantBits = 12;
/// Bits carried verbatim after an escape symbol (zigzag-encoded 64-bit value).
inline constexpr unsigned kEscapeRawBits = 64;

/// Quantized frequency table over a contiguous integer alphabet
/// [min_symbol, max_symbol] plus one escape symbol for everything else.
/// Frequencies sum to exactly 2^quant_bits and every entry is at least 1.
class SymbolModel {
 public:
  /// `pmf[i]` is the probability of symbol `min_symbol + i`; `escape_mass`
  /// the probability of all symbols outside the alphabet.
  static SymbolModel from_pmf(std::int64_t min_symbol, std::span<const double> pmf, double escape_mass,
                              unsigned quant_bits = kDefaultQuantBits);

  std::int64_t min_symbol() const noexcept { return min_; }
  std::int64_t max_symbol() const noexcept { return min_ + static_cast<std::int64_t>(freq_.size()) - 2; }
  std::size_t alphabet_size() const noexcept { return freq_.size() - 1; }
  unsigned quant_bits() const noexcept { return quant_bits_; }

  bool in_alphabet(std::int64_t symbol) const noexcept {
    return symbol >= min_ && symbol <= max_symbol();
  }
  /// Frequency of the symbol's slot (the escape slot for out-of-alphabet symbols).
  std::uint32_t frequency(std::int64_t symbol) const noexcept;
  std::uint32_t escape_frequency() const noexcept { return freq_.back(); }
  /// Ideal code length under the quantized model, including raw escape bits.
  double code_length_bits(std::int64_t symbol) const noexcept;

 private:
  friend std::vector<std::uint8_t> rans_encode(std::span<const std::int64_t>, const SymbolModel&);
  friend std::vector<std::int64_t> rans_decode(std::span<const std::uint8_t>, std::size_t, const SymbolModel&);

  std::size_t slot(std::int64_t symbol) const noexcept {
    return in_alphabet(symbol) ? static_cast<std::size_t>(symbol - min_) : freq_.size() - 1;
  }

  std::int64_t min_ = 0;
  unsigned quant_bits_ = kDefaultQuantBits;
  std::vector<std::uint32_t> freq_;  // alphabet slots then escape
  std::vector<std::uint32_t> cum_;   // cum_[i] = sum of freq_[0..i)
  std::vector<std::uint32_t> lookup_;  // cumulative position -> slot
};

/// rANS with a 32-bit state, byte-wise renormalization (state kept in
/// [2^23, 2^31)) and symbols encoded in reverse. Stream layout: final
/// encoder state (4 bytes, little-endian) then renormalization bytes in
/// decode order.
std::vector<std::uint8_t> rans_encode(std::span<const std::int64_t> symbols, const SymbolModel& model);

/// Decodes exactly `count` symbols. Throws Error(corrupt_stream) when the
/// stream underruns, has trailing bytes, or does not end in the initial state.
std::vector<std::int64_t> rans_decode(std::span<const std::uint8_t> stream, std::size_t count,
                                      const SymbolModel& model);

/// Sum of code lengths in bits: the cross-entropy of `symbols` under `model`.
double model_cross_entropy_bits(std::span<const std::int64_t> symbols, const SymbolModel& model);

}  // namespace commonsense::codec
