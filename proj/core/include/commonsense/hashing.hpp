#pragma once

#include <cstdint>

#include "commonsense/element.hpp"

namespace commonsense {

/// splitmix64 finalizer; a bijection on 64-bit words.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
  x ^= x >> 30;
  x *= 0xbf58476d1ce4e5b9ULL;
  x ^= x >> 27;
  x *= 0x94d049bb133111ebULL;
  x ^= x >> 31;
  return x;
}

/// Independent hash families are separated by a domain tag mixed into the key.
enum class HashDomain : std::uint64_t {
  element_digest = 0x6469676573743031ULL,
  column = 0x636f6c756d6e3031ULL,
  bloom = 0x626c6f6f6d303031ULL,
  iblt_cell = 0x69626c7463656c6cULL,
  iblt_fingerprint = 0x69626c7466707231ULL,
  signature = 0x7369676e61747572ULL,
  checksum = 0x636865636b73756dULL,
};

constexpr std::uint64_t derive_key(std::uint64_t seed, HashDomain domain) noexcept {
  return mix64(seed ^ mix64(static_cast<std::uint64_t>(domain)));
}

/// Keyed 64-bit hash of a full 256-bit id.
std::uint64_t keyed_hash(std::uint64_t key, const ElementId& id) noexcept;

struct Digest128 {
  std::uint64_t lo = 0;
  std::uint64_t hi = 0;
};

/// 128-bit digest built from two independently keyed hashes.
Digest128 digest128(std::uint64_t key, const ElementId& id) noexcept;

__extension__ typedef unsigned __int128 uint128;

/// Maps a uniform 64-bit word onto [0, bound) without division.
constexpr std::uint32_t reduce_range(std::uint64_t word, std::uint32_t bound) noexcept {
  return static_cast<std::uint32_t>((static_cast<uint128>(word) * bound) >> 64);
}

}  // namespace commonsense
