#pragma once

#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>

namespace commonsense {

/// An element of the universe {0, ..., 2^u - 1}, u <= 256.
///
/// Stored as four little-endian 64-bit limbs; ids with u <= 64 only use
/// limbs[0]. Ordering is numeric.
struct ElementId {
  std::array<std::uint64_t, 4> limbs{};

  constexpr ElementId() noexcept = default;
  constexpr explicit ElementId(std::uint64_t value) noexcept : limbs{value, 0, 0, 0} {}
  constexpr explicit ElementId(const std::array<std::uint64_t, 4>& l) noexcept : limbs(l) {}

  friend constexpr bool operator==(const ElementId&, const ElementId&) noexcept = default;
  friend constexpr std::strong_ordering operator<=>(const ElementId& a,
                                                    const ElementId& b) noexcept {
    for (int i = 3; i >= 0; --i) {
      if (auto c = a.limbs[i] <=> b.limbs[i]; c != 0) return c;
    }
    return std::strong_ordering::equal;
  }

  /// Number of significant bits (0 for the zero id).
  unsigned bit_width() const noexcept;

  /// Lower-case hex without leading zeros ("0" for zero).
  std::string to_hex() const;
  /// Parses hex with optional 0x prefix; throws Error on bad input or > 256 bits.
  static ElementId from_hex(std::string_view text);

  /// Little-endian serialization of the low ceil(bits/8) bytes.
  void write_le(std::uint8_t* out, unsigned bytes) const noexcept;
};

struct ElementIdHash {
  std::size_t operator()(const ElementId& id) const noexcept;
};

}  // namespace commonsense
