#include "commonsense/element.hpp"

#include <bit>

#include "commonsense/error.hpp"
#include "commonsense/hashing.hpp"

namespace commonsense {

unsigned ElementId::bit_width() const noexcept {
  for (int i = 3; i >= 0; --i) {
    if (limbs[i] != 0) return static_cast<unsigned>(64 * i + std::bit_width(limbs[i]));
  }
  return 0;
}

std::string ElementId::to_hex() const {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out;
  bool started = false;
  for (int i = 3; i >= 0; --i) {
    for (int nib = 15; nib >= 0; --nib) {
      unsigned v = static_cast<unsigned>(limbs[i] >> (4 * nib)) & 0xfU;
      if (v != 0) started = true;
      if (started) out.push_back(kDigits[v]);
    }
  }
  return started ? out : std::string("0");
}

ElementId ElementId::from_hex(std::string_view text) {
  if (text.starts_with("0x") || text.starts_with("0X")) text.remove_prefix(2);
  if (text.empty()) throw Error(Errc::invalid_argument, "empty hex id");
  while (text.size() > 1 && text.front() == '0') text.remove_prefix(1);
  if (text.size() > 64) throw Error(Errc::invalid_argument, "hex id wider than 256 bits");
  ElementId id;
  std::size_t nibble = 0;
  for (auto it = text.rbegin(); it != text.rend(); ++it, ++nibble) {
    char c = *it;
    std::uint64_t v;
    if (c >= '0' && c <= '9') v = static_cast<std::uint64_t>(c - '0');
    else if (c >= 'a' && c <= 'f') v = static_cast<std::uint64_t>(c - 'a' + 10);
    else if (c >= 'A' && c <= 'F') v = static_cast<std::uint64_t>(c - 'A' + 10);
    else throw Error(Errc::invalid_argument, "bad hex digit in id");
    id.limbs[nibble / 16] |= v << (4 * (nibble % 16));
  }
  return id;
}

void ElementId::write_le(std::uint8_t* out, unsigned bytes) const noexcept {
  for (unsigned i = 0; i < bytes && i < 32; ++i) {
    out[i] = static_cast<std::uint8_t>(limbs[i / 8] >> (8 * (i % 8)));
  }
}

std::size_t ElementIdHash::operator()(const ElementId& id) const noexcept {
  return static_cast<std::size_t>(keyed_hash(0x5eed5eed5eedULL, id));
}

}  // namespace commonsense
