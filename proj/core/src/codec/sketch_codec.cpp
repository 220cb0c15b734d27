#include "commonsense/codec/sketch_codec.hpp"

#include <algorithm>
#include <cmath>

#include "commonsense/codec/bch.hpp"
#include "commonsense/codec/rans.hpp"
#include "commonsense/error.hpp"

namespace commonsense::codec {

namespace {

std::int64_t floor_mod(std::int64_t a, std::int64_t k) noexcept {
  const std::int64_t r = a % k;
  return r < 0 ? r + k : r;
}

SymbolModel sketch_symbol_model(const MatrixSpec& spec, std::int64_t element_count, std::int64_t modulus) {
  const double lambda =
      std::max(0.0, static_cast<double>(element_count) * spec.ones_per_column / static_cast<double>(spec.rows));
  return folded_model({std::min(lambda, kMaxModelRate), 0.0}, modulus);
}

std::vector<std::uint8_t> parity_planes(std::span<const std::int64_t> quotients, unsigned levels) {
  const std::size_t n = quotients.size();
  std::vector<std::uint8_t> bits(n * levels);
  for (unsigned b = 0; b < levels; ++b)
    for (std::size_t i = 0; i < n; ++i) bits[b * n + i] = static_cast<std::uint8_t>((quotients[i] >> b) & 1);
  return bits;
}

}  // namespace

void TruncationParams::validate() const {
  if (v > 0 || w < 0 || modulus() < 2) throw Error(Errc::invalid_argument, "truncation range must satisfy v <= 0 <= w, w > v");
  if (modulus() > 2048) throw Error(Errc::invalid_argument, "truncation modulus too large");
  if (bch_t > kBchMaxT) throw Error(Errc::invalid_argument, "BCH capacity above 127");
  if (bch_t > 0 && (parity_levels < 1 || parity_levels > 16))
    throw Error(Errc::invalid_argument, "parity levels must be in [1, 16]");
}

std::pair<std::int64_t, std::int64_t> split_difference(const SketchPrior& prior) {
  const std::int64_t d = std::max<std::int64_t>(0, prior.difference);
  const std::int64_t b_only = std::clamp<std::int64_t>((d + prior.receiver_size - prior.sender_size) / 2, 0, d);
  return {d - b_only, b_only};
}

SkellamParams difference_model(const SketchPrior& prior, const MatrixSpec& spec) {
  const auto [a_only, b_only] = split_difference(prior);
  const double scale = static_cast<double>(spec.ones_per_column) / static_cast<double>(spec.rows);
  return {static_cast<double>(b_only) * scale, static_cast<double>(a_only) * scale};
}

TruncationParams choose_truncation(SkellamParams difference, std::uint32_t rows, const TruncationPolicy& policy) {
  if (!(policy.p_trunc > 0.0 && policy.p_trunc < 1.0)) throw Error(Errc::invalid_argument, "p_trunc must be in (0, 1)");
  Interval iv = skellam_interval(difference, policy.p_trunc);
  if (iv.hi - iv.lo < 1) iv.hi = iv.lo + 1;
  TruncationParams p;
  p.v = static_cast<std::int32_t>(iv.lo);
  p.w = static_cast<std::int32_t>(iv.hi);
  p.parity_levels = policy.parity_levels;
  if (policy.parity_levels > 0 && policy.max_bch_t > 0) {
    const PmfTable full = skellam_full_pmf(difference);
    double inside = 0.0;
    for (std::int64_t k = iv.lo; k <= iv.hi; ++k) inside += full.at(k);
    const double miss = std::max(0.0, 1.0 - inside);
    const double per_block = miss * static_cast<double>(std::min<std::size_t>(rows, kBchBlockBits));
    const double t = std::ceil(2.0 * per_block + 10.0);
    p.bch_t = static_cast<std::uint16_t>(std::min<double>(t, std::min(policy.max_bch_t, kBchMaxT)));
  }
  p.validate();
  return p;
}

void SketchHeader::serialize(ByteWriter& out) const {
  out.u32(spec.rows);
  out.u8(static_cast<std::uint8_t>(spec.ones_per_column));
  out.u64(spec.seed);
  out.u16(static_cast<std::uint16_t>(spec.universe_bits));
  out.i64(element_count);
}

SketchHeader SketchHeader::deserialize(ByteReader& in) {
  SketchHeader h;
  h.spec.rows = in.u32();
  h.spec.ones_per_column = in.u8();
  h.spec.seed = in.u64();
  h.spec.universe_bits = in.u16();
  h.element_count = in.i64();
  try {
    h.spec.validate();
  } catch (const Error& e) {
    throw Error(Errc::corrupt_stream, e.what());
  }
  return h;
}

std::vector<std::int64_t> truncate_values(std::span<const std::int64_t> values, std::int64_t modulus) {
  std::vector<std::int64_t> out(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) out[i] = floor_mod(values[i], modulus);
  return out;
}

std::vector<std::uint8_t> compress_sketch(const Sketch& alice, const TruncationParams& params,
                                          SkellamParams difference) {
  params.validate();
  difference.mu1 = std::clamp(difference.mu1, 0.0, kMaxModelRate);
  difference.mu2 = std::clamp(difference.mu2, 0.0, kMaxModelRate);
  const std::int64_t k = params.modulus();
  const auto truncated = truncate_values(alice.values, k);

  std::vector<std::uint8_t> payload;
  ByteWriter out(payload);
  out.i32(params.v);
  out.i32(params.w);
  out.u8(params.parity_levels);
  out.u16(params.bch_t);
  out.f64(difference.mu1);
  out.f64(difference.mu2);
  out.blob(rans_encode(truncated, sketch_symbol_model(alice.spec, alice.element_count, k)));
  if (params.bch_t > 0) {
    std::vector<std::int64_t> quotients(truncated.size());
    for (std::size_t i = 0; i < truncated.size(); ++i) quotients[i] = (alice.values[i] - truncated[i]) / k;
    out.blob(bch_encode_parities(parity_planes(quotients, params.parity_levels), params.bch_t));
  } else {
    out.blob({});
  }
  return payload;
}

std::vector<std::uint8_t> compress_sketch(const Sketch& alice, const SketchPrior& prior,
                                          const TruncationPolicy& policy) {
  const SkellamParams diff = difference_model(prior, alice.spec);
  return compress_sketch(alice, choose_truncation(diff, alice.spec.rows, policy), diff);
}

RecoveredSketch recover_sketch(const Sketch& bob, const SketchHeader& header, std::span<const std::uint8_t> payload) {
  if (!(header.spec == bob.spec)) throw Error(Errc::spec_mismatch, "sketch header does not match local spec");
  ByteReader in(payload);
  RecoveredSketch r;
  r.params.v = in.i32();
  r.params.w = in.i32();
  r.params.parity_levels = in.u8();
  r.params.bch_t = in.u16();
  r.difference.mu1 = in.f64();
  r.difference.mu2 = in.f64();
  try {
    r.params.validate();
  } catch (const Error& e) {
    throw Error(Errc::corrupt_stream, e.what());
  }
  if (!(r.difference.mu1 >= 0.0 && r.difference.mu2 >= 0.0 && r.difference.mu1 <= kMaxModelRate &&
        r.difference.mu2 <= kMaxModelRate))
    throw Error(Errc::corrupt_stream, "invalid difference model");
  const std::int64_t k = r.params.modulus();
  const std::size_t n = bob.values.size();
  const auto truncated = rans_decode(in.blob(), n, sketch_symbol_model(header.spec, header.element_count, k));
  const auto syndrome = in.blob();
  if (in.remaining() != 0) throw Error(Errc::corrupt_stream, "trailing bytes in sketch payload");

  r.sketch.spec = header.spec;
  r.sketch.element_count = header.element_count;
  r.sketch.values.resize(n);
  std::vector<std::int64_t> quotients(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (truncated[i] < 0 || truncated[i] >= k) throw Error(Errc::corrupt_stream, "truncated value out of range");
    const std::int64_t y = bob.values[i];
    const std::int64_t x = y - r.params.v - floor_mod(y - r.params.v - truncated[i], k);
    r.sketch.values[i] = x;
    quotients[i] = (x - truncated[i]) / k;
  }
  if (r.params.bch_t == 0) {
    r.parity_available = false;
    r.unverified_rows.resize(n);
    for (std::size_t i = 0; i < n; ++i) r.unverified_rows[i] = static_cast<std::uint32_t>(i);
    return r;
  }

  const unsigned levels = r.params.parity_levels;
  const auto local = parity_planes(quotients, levels);
  const BchResult fix = bch_correct(local, syndrome, r.params.bch_t);
  r.parity_available = fix.ok();
  for (std::size_t block : fix.failed_blocks) {
    const std::size_t end = std::min(local.size(), (block + 1) * kBchBlockBits);
    for (std::size_t pos = block * kBchBlockBits; pos < end; ++pos)
      r.unverified_rows.push_back(static_cast<std::uint32_t>(pos % n));
  }
  std::sort(r.unverified_rows.begin(), r.unverified_rows.end());
  r.unverified_rows.erase(std::unique(r.unverified_rows.begin(), r.unverified_rows.end()), r.unverified_rows.end());
  if (fix.flips.empty()) return r;

  std::vector<std::uint8_t> remote = local;
  std::vector<std::size_t> touched;
  for (std::size_t pos : fix.flips) {
    remote[pos] ^= 1;
    touched.push_back(pos % n);
  }
  std::sort(touched.begin(), touched.end());
  touched.erase(std::unique(touched.begin(), touched.end()), touched.end());

  const PmfTable pmf = skellam_full_pmf(r.difference);
  const std::int64_t period = std::int64_t{1} << levels;
  for (std::size_t i : touched) {
    std::int64_t want = 0;
    for (unsigned b = 0; b < levels; ++b) want |= static_cast<std::int64_t>(remote[b * n + i]) << b;
    const std::int64_t shift = floor_mod(want - quotients[i], period);
    if (shift == 0) continue;
    const std::int64_t d_hat = bob.values[i] - r.sketch.values[i];
    const std::int64_t up = shift;
    const std::int64_t down = shift - period;
    const double p_up = pmf.at(d_hat - up * k);
    const double p_down = pmf.at(d_hat - down * k);
    std::int64_t j;
    if (p_up != p_down) {
      j = p_up > p_down ? up : down;
    } else {
      j = std::abs(up) <= std::abs(down) ? up : down;
    }
    r.sketch.values[i] += j * k;
    ++r.parity_corrections;
  }
  return r;
}

SkellamParams compress_residue(std::span<const std::int64_t> values, ByteWriter& out) {
  SkellamParams params = values.empty() ? SkellamParams{kSkellamFloor, kSkellamFloor} : skellam_fit(values);
  params.mu1 = std::min(params.mu1, kMaxModelRate);
  params.mu2 = std::min(params.mu2, kMaxModelRate);
  out.f64(params.mu1);
  out.f64(params.mu2);
  out.blob(rans_encode(values, skellam_model(params)));
  return params;
}

std::vector<std::int64_t> decompress_residue(ByteReader& in, std::size_t count) {
  SkellamParams params;
  params.mu1 = in.f64();
  params.mu2 = in.f64();
  if (!(params.mu1 >= 0.0 && params.mu2 >= 0.0 && std::isfinite(params.mu1) && std::isfinite(params.mu2) &&
        params.mu1 <= kMaxModelRate && params.mu2 <= kMaxModelRate))
    throw Error(Errc::corrupt_stream, "invalid residue model");
  return rans_decode(in.blob(), count, skellam_model(params));
}

}  // namespace commonsense::codec
