#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "commonsense/byte_io.hpp"
#include "commonsense/element.hpp"

namespace commonsense {

/// Bloom filter used as the set membership filter exchanged between peers.
///
/// Wire layout: bit count L (u32), probe count k (u8), seed (u64), then
/// ceil(L / 8) raw bytes, bit i stored at byte i / 8, bit position i % 8.
class BloomFilter {
 public:
  /// Sizes the filter for `target_fpp` using the standard optimum
  /// L = ceil(n log2(e) log2(1/p)), k = ceil((L / n) ln 2). An empty set gets
  /// an 8-bit, single-probe filter.
  static BloomFilter build(std::span<const ElementId> elements, double target_fpp, std::uint64_t seed);

  bool query(const ElementId& id) const noexcept;

  std::uint32_t bit_count() const noexcept { return bit_count_; }
  std::uint8_t hash_count() const noexcept { return hash_count_; }
  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t inserted_count() const noexcept { return inserted_; }
  std::span<const std::uint8_t> bytes() const noexcept { return bits_; }

  std::size_t wire_size() const noexcept { return 13 + bits_.size(); }
  void serialize(ByteWriter& out) const;
  static BloomFilter deserialize(ByteReader& in);

  friend bool operator==(const BloomFilter& a, const BloomFilter& b) {
    return a.bit_count_ == b.bit_count_ && a.hash_count_ == b.hash_count_ && a.seed_ == b.seed_ &&
           a.bits_ == b.bits_;
  }

 private:
  BloomFilter(std::uint32_t bits, std::uint8_t k, std::uint64_t seed);
  void insert(const ElementId& id) noexcept;

  std::uint32_t bit_count_ = 0;
  std::uint8_t hash_count_ = 0;
  std::uint64_t seed_ = 0;
  std::uint64_t inserted_ = 0;
  std::vector<std::uint8_t> bits_;
};

inline BloomFilter bf_build(std::span<const ElementId> elements, double target_fpp, std::uint64_t seed = 0) {
  return BloomFilter::build(elements, target_fpp, seed);
}
inline bool bf_query(const BloomFilter& filter, const ElementId& id) noexcept { return filter.query(id); }

}  // namespace commonsense
