#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace commonsense::codec {

/// GF(2^10) with primitive polynomial x^10 + x^3 + 1.
inline constexpr unsigned kGfDegree = 10;
inline constexpr std::uint32_t kGfPolynomial = 0x409;
inline constexpr std::size_t kBchBlockBits = (1U << kGfDegree) - 1;
inline constexpr unsigned kBchMaxT = 127;

class Gf1024 {
 public:
  static std::uint16_t mul(std::uint16_t a, std::uint16_t b) noexcept;
  static std::uint16_t inv(std::uint16_t a) noexcept;
  /// alpha^e for any integer exponent.
  static std::uint16_t pow_alpha(std::int64_t e) noexcept;
};

/// Odd syndromes S_1, S_3, ..., S_{2t-1} of one block (at most 1023 bits,
/// bit p contributing alpha^p). These are what the sender transmits.
std::vector<std::uint16_t> bch_block_syndromes(std::span<const std::uint8_t> bits, unsigned t);

/// Error positions from the XOR of local and remote odd syndromes, via
/// Berlekamp-Massey and a Chien search over `length` positions. Returns
/// false when more than t errors are detected.
bool bch_locate(std::span<const std::uint16_t> odd_syndromes, std::size_t length, std::vector<std::size_t>& positions);

/// Syndromes of `bits` split into 1023-bit blocks, packed 10 bits per syndrome, LSB first.
std::vector<std::uint8_t> bch_encode_parities(std::span<const std::uint8_t> bits, unsigned t);

struct BchResult {
  std::vector<std::size_t> flips;          // positions (global) whose local bit must flip
  std::vector<std::size_t> failed_blocks;  // blocks where decoding failed
  bool ok() const noexcept { return failed_blocks.empty(); }
};

/// Positions where the remote bits (described by `syndrome`) differ from `local_bits`.
/// Throws Error(corrupt_stream) if the syndrome size does not match.
BchResult bch_correct(std::span<const std::uint8_t> local_bits, std::span<const std::uint8_t> syndrome, unsigned t);

/// Bytes produced by bch_encode_parities for `bit_count` bits.
std::size_t bch_syndrome_bytes(std::size_t bit_count, unsigned t) noexcept;

}  // namespace commonsense::codec
