#include "commonsense/codec/bch.hpp"

#include <array>

#include "commonsense/error.hpp"

namespace commonsense::codec {

namespace {

constexpr std::uint32_t kOrder = (1U << kGfDegree) - 1;

struct Tables {
  std::array<std::uint16_t, 2 * kOrder> exp{};
  std::array<std::uint16_t, kOrder + 1> log{};

  Tables() {
    std::uint32_t x = 1;
    for (std::uint32_t i = 0; i < kOrder; ++i) {
      exp[i] = static_cast<std::uint16_t>(x);
      log[x] = static_cast<std::uint16_t>(i);
      x <<= 1;
      if (x & (1U << kGfDegree)) x ^= kGfPolynomial;
    }
    for (std::uint32_t i = kOrder; i < 2 * kOrder; ++i) exp[i] = exp[i - kOrder];
  }
};

const Tables& tables() {
  static const Tables t;
  return t;
}

std::size_t block_count(std::size_t bits) noexcept { return (bits + kBchBlockBits - 1) / kBchBlockBits; }

void check_t(unsigned t) {
  if (t == 0 || t > kBchMaxT) throw Error(Errc::invalid_argument, "BCH capacity must be in [1, 127]");
}

}  // namespace

std::uint16_t Gf1024::mul(std::uint16_t a, std::uint16_t b) noexcept {
  if (a == 0 || b == 0) return 0;
  const auto& t = tables();
  return t.exp[t.log[a] + t.log[b]];
}

std::uint16_t Gf1024::inv(std::uint16_t a) noexcept {
  const auto& t = tables();
  return t.exp[(kOrder - t.log[a]) % kOrder];
}

std::uint16_t Gf1024::pow_alpha(std::int64_t e) noexcept {
  const auto r = ((e % kOrder) + kOrder) % kOrder;
  return tables().exp[static_cast<std::size_t>(r)];
}

std::vector<std::uint16_t> bch_block_syndromes(std::span<const std::uint8_t> bits, unsigned t) {
  check_t(t);
  if (bits.size() > kBchBlockBits) throw Error(Errc::invalid_argument, "BCH block longer than 1023 bits");
  const auto& tb = tables();
  std::vector<std::uint16_t> s(t, 0);
  for (std::size_t p = 0; p < bits.size(); ++p) {
    if (!bits[p]) continue;
    for (unsigned i = 0; i < t; ++i) s[i] ^= tb.exp[(p * (2 * i + 1)) % kOrder];
  }
  return s;
}

bool bch_locate(std::span<const std::uint16_t> odd, std::size_t length, std::vector<std::size_t>& positions) {
  positions.clear();
  const std::size_t t = odd.size();
  bool any = false;
  for (auto v : odd) any |= v != 0;
  if (!any) return true;

  // Full syndrome sequence S_1..S_2t using S_2j = S_j^2 in characteristic 2.
  std::vector<std::uint16_t> s(2 * t + 1, 0);
  for (std::size_t i = 0; i < t; ++i) s[2 * i + 1] = odd[i];
  for (std::size_t j = 1; 2 * j <= 2 * t; ++j) s[2 * j] = Gf1024::mul(s[j], s[j]);

  std::vector<std::uint16_t> c(2 * t + 2, 0), b(2 * t + 2, 0), tmp;
  c[0] = b[0] = 1;
  std::size_t len = 0;
  std::size_t shift = 1;
  std::uint16_t bd = 1;
  for (std::size_t n = 0; n < 2 * t; ++n) {
    std::uint16_t d = s[n + 1];
    for (std::size_t i = 1; i <= len; ++i) d ^= Gf1024::mul(c[i], s[n + 1 - i]);
    if (d == 0) {
      ++shift;
      continue;
    }
    const std::uint16_t coef = Gf1024::mul(d, Gf1024::inv(bd));
    if (2 * len <= n) {
      tmp = c;
      for (std::size_t i = 0; i + shift < c.size(); ++i) c[i + shift] ^= Gf1024::mul(coef, b[i]);
      len = n + 1 - len;
      b = tmp;
      bd = d;
      shift = 1;
    } else {
      for (std::size_t i = 0; i + shift < c.size(); ++i) c[i + shift] ^= Gf1024::mul(coef, b[i]);
      ++shift;
    }
  }
  if (len > t) return false;
  for (std::size_t i = len + 1; i < c.size(); ++i)
    if (c[i] != 0) return false;

  // Chien search: position p is an error iff Lambda(alpha^-p) = 0.
  const auto& tb = tables();
  for (std::size_t p = 0; p < length; ++p) {
    std::uint16_t v = c[0];
    for (std::size_t i = 1; i <= len; ++i) {
      if (c[i] == 0) continue;
      const std::size_t e = (kOrder - (p * i) % kOrder) % kOrder;
      v ^= tb.exp[(tb.log[c[i]] + e) % kOrder];
    }
    if (v == 0) positions.push_back(p);
  }
  if (positions.size() != len) {
    positions.clear();
    return false;
  }
  return true;
}

std::size_t bch_syndrome_bytes(std::size_t bit_count, unsigned t) noexcept {
  return (block_count(bit_count) * t * kGfDegree + 7) / 8;
}

std::vector<std::uint8_t> bch_encode_parities(std::span<const std::uint8_t> bits, unsigned t) {
  check_t(t);
  std::vector<std::uint8_t> out(bch_syndrome_bytes(bits.size(), t), 0);
  std::size_t bitpos = 0;
  for (std::size_t b = 0; b < block_count(bits.size()); ++b) {
    const std::size_t begin = b * kBchBlockBits;
    const std::size_t len = std::min(kBchBlockBits, bits.size() - begin);
    for (std::uint16_t s : bch_block_syndromes(bits.subspan(begin, len), t)) {
      for (unsigned k = 0; k < kGfDegree; ++k, ++bitpos)
        if ((s >> k) & 1U) out[bitpos / 8] |= static_cast<std::uint8_t>(1U << (bitpos % 8));
    }
  }
  return out;
}

BchResult bch_correct(std::span<const std::uint8_t> local_bits, std::span<const std::uint8_t> syndrome, unsigned t) {
  check_t(t);
  if (syndrome.size() != bch_syndrome_bytes(local_bits.size(), t))
    throw Error(Errc::corrupt_stream, "BCH syndrome length mismatch");
  BchResult result;
  std::size_t bitpos = 0;
  std::vector<std::size_t> positions;
  for (std::size_t b = 0; b < block_count(local_bits.size()); ++b) {
    const std::size_t begin = b * kBchBlockBits;
    const std::size_t len = std::min(kBchBlockBits, local_bits.size() - begin);
    auto diff = bch_block_syndromes(local_bits.subspan(begin, len), t);
    for (auto& s : diff) {
      std::uint16_t remote = 0;
      for (unsigned k = 0; k < kGfDegree; ++k, ++bitpos)
        remote |= static_cast<std::uint16_t>(((syndrome[bitpos / 8] >> (bitpos % 8)) & 1U) << k);
      s ^= remote;
    }
    if (!bch_locate(diff, len, positions)) {
      result.failed_blocks.push_back(b);
      continue;
    }
    for (std::size_t p : positions) result.flips.push_back(begin + p);
  }
  return result;
}

}  // namespace commonsense::codec
