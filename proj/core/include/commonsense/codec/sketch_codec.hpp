#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "commonsense/byte_io.hpp"
#include "commonsense/codec/skellam.hpp"
#include "commonsense/sketch.hpp"

namespace commonsense::codec {

struct TruncationParams {
  std::int32_t v = 0;
  std::int32_t w = 0;
  std::uint8_t parity_levels = 1;
  std::uint16_t bch_t = 0;  // 0: no parity plane

  std::int64_t modulus() const noexcept { return static_cast<std::int64_t>(w) - v + 1; }
  /// Throws Error(invalid_argument) unless v <= 0 <= w, modulus >= 2 and the
  /// parity settings are in range.
  void validate() const;

  friend bool operator==(const TruncationParams&, const TruncationParams&) = default;
};

/// Set-size estimates available to both peers before the first message.
struct SketchPrior {
  std::int64_t sender_size = 0;    // |A|
  std::int64_t receiver_size = 0;  // |B|
  std::int64_t difference = 0;     // d = |A \ B| + |B \ A|
};

struct TruncationPolicy {
  double p_trunc = 1e-3;
  std::uint8_t parity_levels = 1;
  unsigned max_bch_t = 127;
};

/// Split of d into (|A \ B|, |B \ A|) implied by the set sizes.
std::pair<std::int64_t, std::int64_t> split_difference(const SketchPrior& prior);

/// Model of the receiver-side difference Y - X: Skellam(|B\A| m / l, |A\B| m / l).
SkellamParams difference_model(const SketchPrior& prior, const MatrixSpec& spec);

/// [v, w] covering Y - X with per-coordinate miss probability <= p_trunc and a
/// BCH capacity of ceil(2 * expected misses per block + 10), capped.
TruncationParams choose_truncation(SkellamParams difference, std::uint32_t rows, const TruncationPolicy& policy = {});

/// Sent ahead of the codec payload so the receiver can rebuild the models.
struct SketchHeader {
  MatrixSpec spec;
  std::int64_t element_count = 0;

  void serialize(ByteWriter& out) const;
  static SketchHeader deserialize(ByteReader& in);
};
inline constexpr std::size_t kSketchHeaderWireBytes = kMatrixSpecWireBytes + 8;

/// Payload: v i32, w i32, parity_levels u8, bch_t u16, mu1 f64, mu2 f64,
/// rANS stream of X mod (w - v + 1) (len u32 + bytes), BCH syndromes (len u32 + bytes).
std::vector<std::uint8_t> compress_sketch(const Sketch& alice, const TruncationParams& params,
                                          SkellamParams difference);
/// Chooses the truncation from the prior and policy.
std::vector<std::uint8_t> compress_sketch(const Sketch& alice, const SketchPrior& prior,
                                          const TruncationPolicy& policy = {});

struct RecoveredSketch {
  Sketch sketch;
  TruncationParams params;
  SkellamParams difference;
  bool parity_available = true;
  std::size_t parity_corrections = 0;
  /// Rows whose quotient parity could not be checked (all rows without a parity plane).
  std::vector<std::uint32_t> unverified_rows;
};

/// Reconstructs the sender's sketch from the payload and the receiver's own
/// sketch. Throws Error(spec_mismatch) if the header spec differs from bob's.
RecoveredSketch recover_sketch(const Sketch& bob, const SketchHeader& header, std::span<const std::uint8_t> payload);

/// X mod K per coordinate, in [0, K).
std::vector<std::int64_t> truncate_values(std::span<const std::int64_t> values, std::int64_t modulus);

/// Appends mu1 f64, mu2 f64, rANS stream (len u32 + bytes), with the model fitted to `values`.
SkellamParams compress_residue(std::span<const std::int64_t> values, ByteWriter& out);
std::vector<std::int64_t> decompress_residue(ByteReader& in, std::size_t count);

}  // namespace commonsense::codec
