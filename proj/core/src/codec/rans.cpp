#include "commonsense/codec/rans.hpp"

#include <algorithm>
#include <cmath>

#include "commonsense/error.hpp"

namespace commonsense::codec {

namespace {

constexpr std::uint32_t kStateLow = 1U << 23;
constexpr unsigned kRawChunkBits = 8;

std::uint64_t zigzag(std::int64_t v) noexcept {
  return (static_cast<std::uint64_t>(v) << 1) ^ static_cast<std::uint64_t>(v >> 63);
}
std::int64_t unzigzag(std::uint64_t v) noexcept {
  return static_cast<std::int64_t>(v >> 1) ^ -static_cast<std::int64_t>(v & 1);
}

}  // namespace

SymbolModel SymbolModel::from_pmf(std::int64_t min_symbol, std::span<const double> pmf, double escape_mass,
                                  unsigned quant_bits) {
  if (quant_bits < kRawChunkBits || quant_bits > 16)
    throw Error(Errc::invalid_argument, "quantization bits must be in [8, 16]");
  const std::uint32_t total = 1U << quant_bits;
  if (pmf.size() + 1 > total) throw Error(Errc::invalid_argument, "alphabet too large for quantization");

  const std::size_t slots = pmf.size() + 1;
  std::vector<double> p(pmf.begin(), pmf.end());
  p.push_back(std::max(0.0, escape_mass));
  double mass = 0.0;
  for (double& x : p) {
    x = std::max(0.0, x);
    mass += x;
  }
  if (!(mass > 0.0)) throw Error(Errc::invalid_argument, "pmf has no mass");
  for (double& x : p) x /= mass;

  SymbolModel m;
  m.min_ = min_symbol;
  m.quant_bits_ = quant_bits;
  m.freq_.resize(slots);
  std::int64_t sum = 0;
  for (std::size_t i = 0; i < slots; ++i) {
    m.freq_[i] = static_cast<std::uint32_t>(std::max(1.0, std::floor(p[i] * total + 0.5)));
    sum += m.freq_[i];
  }
  // Greedy fix-up towards the exact total, each step choosing the slot
  // whose change costs the least expected code length.
  while (sum > static_cast<std::int64_t>(total)) {
    std::size_t best = slots;
    double best_cost = 0.0;
    for (std::size_t i = 0; i < slots; ++i) {
      if (m.freq_[i] <= 1) continue;
      double cost = p[i] * std::log2(static_cast<double>(m.freq_[i]) / (m.freq_[i] - 1));
      if (best == slots || cost < best_cost) {
        best = i;
        best_cost = cost;
      }
    }
    --m.freq_[best];
    --sum;
  }
  while (sum < static_cast<std::int64_t>(total)) {
    std::size_t best = 0;
    double best_gain = -1.0;
    for (std::size_t i = 0; i < slots; ++i) {
      double gain = p[i] * std::log2(static_cast<double>(m.freq_[i] + 1) / m.freq_[i]);
      if (gain > best_gain) {
        best = i;
        best_gain = gain;
      }
    }
    ++m.freq_[best];
    ++sum;
  }

  m.cum_.resize(slots + 1, 0);
  for (std::size_t i = 0; i < slots; ++i) m.cum_[i + 1] = m.cum_[i] + m.freq_[i];
  m.lookup_.resize(total);
  for (std::size_t i = 0; i < slots; ++i)
    std::fill(m.lookup_.begin() + m.cum_[i], m.lookup_.begin() + m.cum_[i + 1], static_cast<std::uint32_t>(i));
  return m;
}

std::uint32_t SymbolModel::frequency(std::int64_t symbol) const noexcept { return freq_[slot(symbol)]; }

double SymbolModel::code_length_bits(std::int64_t symbol) const noexcept {
  const double bits = static_cast<double>(quant_bits_) - std::log2(static_cast<double>(frequency(symbol)));
  return in_alphabet(symbol) ? bits : bits + kEscapeRawBits;
}

namespace {

struct Encoder {
  std::uint32_t state = kStateLow;
  std::vector<std::uint8_t> bytes;

  void put(std::uint32_t start, std::uint32_t freq, unsigned scale_bits) {
    const std::uint32_t x_max = ((kStateLow >> scale_bits) << 8) * freq;
    while (state >= x_max) {
      bytes.push_back(static_cast<std::uint8_t>(state & 0xff));
      state >>= 8;
    }
    state = ((state / freq) << scale_bits) + (state % freq) + start;
  }
};

}  // namespace

std::vector<std::uint8_t> rans_encode(std::span<const std::int64_t> symbols, const SymbolModel& model) {
  const unsigned scale = model.quant_bits_;
  const unsigned raw_shift = scale - kRawChunkBits;
  Encoder enc;
  enc.bytes.reserve(symbols.size() / 2 + 16);
  for (auto it = symbols.rbegin(); it != symbols.rend(); ++it) {
    const std::size_t s = model.slot(*it);
    if (s == model.freq_.size() - 1) {
      const std::uint64_t raw = zigzag(*it);
      // Raw chunks are decoded after the escape, lowest chunk first.
      for (int c = kEscapeRawBits / kRawChunkBits - 1; c >= 0; --c) {
        const auto chunk = static_cast<std::uint32_t>((raw >> (c * kRawChunkBits)) & 0xff);
        enc.put(chunk << raw_shift, 1U << raw_shift, scale);
      }
    }
    enc.put(model.cum_[s], model.freq_[s], scale);
  }
  std::vector<std::uint8_t> out;
  out.reserve(enc.bytes.size() + 4);
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(enc.state >> (8 * i)));
  out.insert(out.end(), enc.bytes.rbegin(), enc.bytes.rend());
  return out;
}

std::vector<std::int64_t> rans_decode(std::span<const std::uint8_t> stream, std::size_t count,
                                      const SymbolModel& model) {
  if (stream.size() < 4) throw Error(Errc::corrupt_stream, "rANS stream shorter than its state");
  const unsigned scale = model.quant_bits_;
  const std::uint32_t mask = (1U << scale) - 1;
  const unsigned raw_shift = scale - kRawChunkBits;
  std::uint32_t x = 0;
  for (int i = 0; i < 4; ++i) x |= static_cast<std::uint32_t>(stream[i]) << (8 * i);
  std::size_t pos = 4;
  if (x < kStateLow) throw Error(Errc::corrupt_stream, "rANS state below normalization bound");

  auto renorm = [&] {
    while (x < kStateLow) {
      if (pos >= stream.size()) throw Error(Errc::corrupt_stream, "rANS stream underrun");
      x = (x << 8) | stream[pos++];
    }
  };
  auto take = [&](std::uint32_t start, std::uint32_t freq) {
    x = freq * (x >> scale) + (x & mask) - start;
    renorm();
  };

  std::vector<std::int64_t> out;
  out.reserve(count);
  const std::size_t escape = model.freq_.size() - 1;
  for (std::size_t n = 0; n < count; ++n) {
    const std::size_t s = model.lookup_[x & mask];
    take(model.cum_[s], model.freq_[s]);
    if (s != escape) {
      out.push_back(model.min_ + static_cast<std::int64_t>(s));
      continue;
    }
    std::uint64_t raw = 0;
    for (unsigned c = 0; c < kEscapeRawBits / kRawChunkBits; ++c) {
      const std::uint32_t chunk = (x & mask) >> raw_shift;
      take(chunk << raw_shift, 1U << raw_shift);
      raw |= static_cast<std::uint64_t>(chunk) << (c * kRawChunkBits);
    }
    out.push_back(unzigzag(raw));
  }
  if (x != kStateLow || pos != stream.size())
    throw Error(Errc::corrupt_stream, "rANS stream did not terminate cleanly");
  return out;
}

double model_cross_entropy_bits(std::span<const std::int64_t> symbols, const SymbolModel& model) {
  double bits = 0.0;
  for (std::int64_t s : symbols) bits += model.code_length_bits(s);
  return bits;
}

}  // namespace commonsense::codec
