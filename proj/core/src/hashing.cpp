#include "commonsense/hashing.hpp"

#include "commonsense/error.hpp"

namespace commonsense {

namespace {
constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;
}

std::uint64_t keyed_hash(std::uint64_t key, const ElementId& id) noexcept {
  std::uint64_t h = mix64(key + kGolden);
  for (std::uint64_t limb : id.limbs) {
    h = mix64(h ^ (limb * kGolden + 0x632be59bd9b4e019ULL));
  }
  return mix64(h + key);
}

Digest128 digest128(std::uint64_t key, const ElementId& id) noexcept {
  return {keyed_hash(mix64(key ^ 0x1ULL), id), keyed_hash(mix64(key ^ 0x2ULL), id)};
}

const char* to_string(Errc code) noexcept {
  switch (code) {
    case Errc::invalid_argument: return "invalid argument";
    case Errc::spec_mismatch: return "matrix spec mismatch";
    case Errc::budget_exceeded: return "enumeration budget exceeded";
    case Errc::corrupt_stream: return "corrupt stream";
    case Errc::protocol_error: return "protocol error";
    case Errc::signature_collision: return "signature collision";
    case Errc::infeasible: return "infeasible";
    case Errc::decode_failure: return "decode failure";
    case Errc::io_error: return "i/o error";
  }
  return "unknown error";
}

}  // namespace commonsense
