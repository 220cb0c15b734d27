#include "commonsense/smf.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "commonsense/error.hpp"
#include "commonsense/hashing.hpp"

namespace commonsense {

BloomFilter::BloomFilter(std::uint32_t bits, std::uint8_t k, std::uint64_t seed)
    : bit_count_(bits), hash_count_(k), seed_(seed), bits_((bits + 7) / 8, 0) {}

BloomFilter BloomFilter::build(std::span<const ElementId> elements, double target_fpp, std::uint64_t seed) {
  if (!(target_fpp > 0.0 && target_fpp < 1.0))
    throw Error(Errc::invalid_argument, "target false-positive rate must be in (0, 1)");
  if (elements.empty()) return BloomFilter(8, 1, seed);
  const double n = static_cast<double>(elements.size());
  const double bits = std::ceil(n * std::numbers::log2e * std::log2(1.0 / target_fpp));
  if (bits > 4.0e9) throw Error(Errc::invalid_argument, "bloom filter too large");
  const auto l = static_cast<std::uint32_t>(std::max(8.0, bits));
  const double k = std::ceil(static_cast<double>(l) / n * std::numbers::ln2);
  BloomFilter f(l, static_cast<std::uint8_t>(std::clamp(k, 1.0, 64.0)), seed);
  for (const ElementId& e : elements) f.insert(e);
  return f;
}

namespace {
// Kirsch-Mitzenmacher double hashing over a 128-bit digest.
template <typename Visit>
bool for_each_probe(std::uint64_t seed, std::uint32_t bits, std::uint8_t k, const ElementId& id, Visit&& visit) {
  const Digest128 d = digest128(derive_key(seed, HashDomain::bloom), id);
  const std::uint64_t step = d.hi | 1ULL;
  std::uint64_t h = d.lo;
  for (std::uint8_t i = 0; i < k; ++i, h += step) {
    if (!visit(reduce_range(mix64(h), bits))) return false;
  }
  return true;
}
}  // namespace

void BloomFilter::insert(const ElementId& id) noexcept {
  for_each_probe(seed_, bit_count_, hash_count_, id, [&](std::uint32_t bit) {
    bits_[bit / 8] |= static_cast<std::uint8_t>(1U << (bit % 8));
    return true;
  });
  ++inserted_;
}

bool BloomFilter::query(const ElementId& id) const noexcept {
  return for_each_probe(seed_, bit_count_, hash_count_, id,
                        [&](std::uint32_t bit) { return (bits_[bit / 8] >> (bit % 8)) & 1U; });
}

void BloomFilter::serialize(ByteWriter& out) const {
  out.u32(bit_count_);
  out.u8(hash_count_);
  out.u64(seed_);
  out.bytes(bits_);
}

BloomFilter BloomFilter::deserialize(ByteReader& in) {
  const std::uint32_t bits = in.u32();
  const std::uint8_t k = in.u8();
  const std::uint64_t seed = in.u64();
  if (bits == 0 || k == 0) throw Error(Errc::corrupt_stream, "bloom filter with zero bits or probes");
  BloomFilter f(bits, k, seed);
  auto raw = in.bytes(f.bits_.size());
  std::copy(raw.begin(), raw.end(), f.bits_.begin());
  return f;
}

}  // namespace commonsense
