#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "commonsense/codec/sketch_codec.hpp"
#include "commonsense/decoder.hpp"
#include "commonsense/element.hpp"
#include "commonsense/matrix.hpp"
#include "commonsense/transport.hpp"
#include "commonsense/wire.hpp"

namespace commonsense {

inline constexpr std::uint32_t kUnidirectionalWeight = 7;
inline constexpr std::uint32_t kBidirectionalWeight = 5;

struct SessionConfig {
  double alpha = 0.0;                 // 0: per-mode default
  std::uint32_t rows = 0;             // l; 0: derived from alpha
  std::uint32_t ones_per_column = 0;  // m; 0: 7 unidirectional, 5 bidirectional
  std::uint64_t seed = 0;
  std::uint32_t universe_bits = 64;
  std::int64_t d_input = 0;  // SDC; 0: computed from the inputs
  double smf_fpp = 0.01;
  unsigned max_rounds = 10;
  unsigned resolve_round = 4;
  unsigned signature_bits = 64;
  codec::TruncationPolicy truncation{};
  std::size_t max_decode_iterations = 0;  // 0: 16 l + 1024

  /// Throws Error(invalid_argument) on out-of-range fields.
  void validate() const;
};

inline constexpr double kDefaultUnidirectionalAlpha = 3.0;
inline constexpr double kDefaultBidirectionalAlpha = 4.0;

/// l = ceil(alpha d log2(e |B| / d)) with |B| the larger set, at least 2m.
std::uint32_t default_rows(double alpha, std::int64_t d, std::int64_t larger_set, std::uint32_t weight);

/// Matrix parameters for a session between sets of the given sizes.
MatrixSpec resolve_spec(const SessionConfig& config, std::int64_t d, std::int64_t larger_set, bool bidirectional);

enum class Side { first, second };

/// The side with the smaller unique-set estimate initiates; ties go to the
/// lexicographically smaller peer id.
Side choose_initiator(std::int64_t first_unique, std::int64_t second_unique, std::string_view first_id = "alice",
                      std::string_view second_id = "bob");

enum class Outcome {
  exact_mp,           // zero residue through matching pursuit
  exact_ssmp,         // zero residue after the L1 fallback
  exact_modular,      // residue explained by truncation errors in unprotected coordinates
  exact,              // bidirectional: both peers reached the same intersection
  round_limit,
  decode_failure,
  checksum_mismatch,
};
const char* to_string(Outcome outcome) noexcept;
bool is_success(Outcome outcome) noexcept;

struct MessageRecord {
  unsigned sender = 0;  // 0: initiator, 1: responder
  wire::MessageType type = wire::MessageType::done;
  std::size_t bytes = 0;      // framed
  std::size_t smf_bytes = 0;  // membership filter share of the payload
};

struct RoundStats {
  unsigned round = 0;
  unsigned peer = 0;
  DecodeOutcome outcome = DecodeOutcome::stalled;
  std::uint64_t iterations = 0;
  std::int64_t residue_l1_in = 0;
  std::int64_t residue_l1_out = 0;
  std::size_t recovered = 0;
  std::size_t tentative = 0;
  bool resolution = false;
};

struct SessionTranscript {
  std::vector<MessageRecord> messages;
  unsigned rounds = 0;     // SKETCH and RESIDUE messages
  unsigned inquiries = 0;  // LAST_INQUIRY messages
  std::uint64_t total_bytes = 0;
  std::uint64_t transport_bytes = 0;  // metered independently
  Outcome outcome = Outcome::decode_failure;
  std::vector<RoundStats> decoder_stats;
  std::size_t inquiry_confirmations = 0;  // tentative additions found in the peer's unique-set estimate
  bool parity_available = true;
  std::size_t parity_corrections = 0;
  MatrixSpec spec;
};

/// Passed to the session probe after every processed message.
struct ProbeEvent {
  unsigned messages = 0;
  std::vector<ElementId> initiator_estimate;  // initiator's unique-set estimate
  std::vector<ElementId> responder_estimate;
  std::size_t inquiry_confirmations = 0;
};
using SessionProbe = std::function<void(const ProbeEvent&)>;

/// One party of a session, driven by incoming messages.
class Peer {
 public:
  enum class Role { initiator, responder };

  Peer(std::string id, std::vector<ElementId> set, const MatrixSpec& spec, const SessionConfig& config, Role role,
       const codec::SketchPrior& prior, bool bidirectional);
  ~Peer();
  Peer(Peer&&) noexcept;

  /// Initiator only: the first SKETCH message.
  std::vector<wire::Message> start();
  std::vector<wire::Message> on_message(const wire::Message& message);

  bool finished() const noexcept;
  /// Valid once finished.
  Outcome outcome() const noexcept;
  /// Own set minus the unique-set estimate, ascending.
  std::vector<ElementId> intersection() const;
  std::vector<ElementId> unique_estimate() const;

  const std::string& id() const noexcept;
  Role role() const noexcept;
  const std::vector<RoundStats>& stats() const noexcept;
  std::size_t inquiry_confirmations() const noexcept;
  bool parity_available() const noexcept;
  std::size_t parity_corrections() const noexcept;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// Runs two peers over a metered in-memory loopback until both finish.
SessionTranscript drive_session(Peer& initiator, Peer& responder, const SessionProbe& probe = {});

/// Runs one peer over a blocking transport until it finishes.
void run_peer(Peer& peer, Transport& transport);

struct UnidirectionalResult {
  std::vector<ElementId> intersection;  // empty unless the outcome is a success
  SessionTranscript transcript;
};

/// Alice sends one SKETCH; Bob decodes B \ A with MP, falling back to SSMP.
/// Requires alice_set to be a subset of bob_set.
UnidirectionalResult run_unidirectional(std::span<const ElementId> alice_set, std::span<const ElementId> bob_set,
                                        const SessionConfig& config);

struct BidirectionalResult {
  std::vector<ElementId> alice_intersection;
  std::vector<ElementId> bob_intersection;
  SessionTranscript transcript;
  bool alice_initiated = true;
};

/// Ping-pong decoding with membership filters and last inquiries.
BidirectionalResult run_bidirectional(std::span<const ElementId> alice_set, std::span<const ElementId> bob_set,
                                      const SessionConfig& config, const SessionProbe& probe = {});

/// Recovers B \ A from two linear digests over the same matrix, with the
/// candidate list taken from `superset`. Returns nullopt when the residue
/// cannot be explained.
std::optional<std::vector<ElementId>> decode_stream_digest(const Sketch& alice_digest, const Sketch& bob_digest,
                                                           std::span<const ElementId> superset);

/// Order-independent 64-bit checksum of a set.
std::uint64_t set_checksum(std::span<const ElementId> elements, std::uint64_t seed);

/// signature_bits-wide keyed hash used in last inquiries.
std::uint64_t inquiry_signature(const ElementId& id, std::uint64_t seed, unsigned bits);

}  // namespace commonsense
