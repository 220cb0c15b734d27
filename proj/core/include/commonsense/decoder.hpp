#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "commonsense/element.hpp"
#include "commonsense/matrix.hpp"
#include "commonsense/sketch.hpp"

namespace commonsense {

/// Optimal L2 pursuit step for one column: (residue . m_i) / m.
double delta(const Residue& residue, const ColumnSource& columns, const ElementId& element);
/// Integer numerator residue . m_i of the pursuit step.
std::int64_t delta_numerator(std::span<const std::int64_t> residue, std::span<const std::uint32_t> support);
/// Optimal L1 pursuit step for one column: the median of the residue over its support.
double median_step(std::span<const std::int64_t> residue, std::span<const std::uint32_t> support);

enum class DecodeOutcome { zero_residue, stalled, iteration_cap };
const char* to_string(DecodeOutcome outcome) noexcept;

/// Whether a candidate may be flipped 0 -> 1. Removals (1 -> 0) are never gated.
enum class AdditionGate : std::uint8_t {
  open = 0,
  filtered = 1,   // positive in the peer's membership filter
  forbidden = 2,  // confirmed to belong to the peer's unique-set estimate
};

struct SignalUpdate {
  std::uint32_t index;  // candidate index
  std::int8_t direction;  // +1: 0 -> 1, -1: 1 -> 0
};

/// Mutable decoding state over a fixed candidate list.
///
/// Candidates are kept sorted by id, so index order is id order and ties in
/// the priority structure break towards the lowest id. The residue is kept
/// in the orientation where the decoder's own signal is positive.
class DecoderState {
 public:
  DecoderState(const ColumnSource& columns, std::vector<ElementId> candidates,
               std::vector<std::int64_t> residue);

  std::size_t size() const noexcept { return ids_.size(); }
  std::uint32_t rows() const noexcept { return rows_; }
  std::uint32_t weight() const noexcept { return weight_; }
  const ElementId& candidate(std::size_t i) const noexcept { return ids_[i]; }
  std::span<const ElementId> candidates() const noexcept { return ids_; }
  std::span<const std::uint32_t> support(std::size_t i) const noexcept { return supports_[i]; }
  std::optional<std::size_t> index_of(const ElementId& id) const;

  std::span<const std::int64_t> residue() const noexcept { return residue_; }
  bool residue_is_zero() const noexcept { return nonzero_rows_ == 0; }
  std::int64_t residue_l1() const noexcept;

  bool signal(std::size_t i) const noexcept { return signal_[i] != 0; }
  /// Ids with signal 1, ascending.
  std::vector<ElementId> recovered() const;
  std::size_t recovered_count() const noexcept { return ones_; }

  /// Stored pursuit numerator residue . m_i for candidate i.
  std::int64_t numerator(std::size_t i) const noexcept { return numerator_[i]; }

  /// Replaces the residue (resumed rounds); the signal is kept as prior belief.
  void set_residue(std::vector<std::int64_t> residue);

  void set_gate(std::size_t i, AdditionGate gate);
  AdditionGate gate(std::size_t i) const noexcept { return static_cast<AdditionGate>(gate_[i]); }
  /// In tentative mode filtered candidates may be added; such additions are
  /// recorded in tentative() for later verification.
  void set_tentative_mode(bool on);
  bool tentative_mode() const noexcept { return tentative_mode_; }
  const std::vector<std::uint32_t>& tentative() const noexcept { return tentative_; }
  void clear_tentative() { tentative_.clear(); }

  const std::vector<SignalUpdate>& update_log() const noexcept { return log_; }
  void clear_update_log() { log_.clear(); }

  std::uint64_t iterations() const noexcept { return iterations_; }
  /// Total number of candidate priority refreshes caused by updates.
  std::uint64_t touched() const noexcept { return touched_total_; }

  /// Recomputes every numerator from scratch and compares with stored values.
  bool priorities_consistent() const;
  /// residue == residue at last set_residue - M (signal - signal at that time).
  bool bookkeeping_holds() const;

 private:
  enum class Pursuit { none, l2, l1 };

  struct QueueKey {
    std::int64_t gain;
    std::uint32_t index;
  };
  // Heap order: the top has the largest gain, then the lowest index.
  struct QueueOrder {
    bool operator()(const QueueKey& a, const QueueKey& b) const noexcept {
      return a.gain != b.gain ? a.gain < b.gain : a.index > b.index;
    }
  };

  bool addition_allowed(std::size_t i) const noexcept;
  std::int64_t gain(std::size_t i) const noexcept;
  bool eligible(std::size_t i, std::int64_t g) const noexcept;
  void rebuild_queue(Pursuit mode);
  void enqueue(std::uint32_t i, std::int64_t g);
  void compact_queue();
  std::optional<std::size_t> best_queued();
  void apply(std::size_t i, int direction);
  DecodeOutcome run(Pursuit mode, std::size_t max_iterations);

  friend DecodeOutcome mp_decode(DecoderState& state, std::size_t max_iterations);
  friend DecodeOutcome ssmp_decode(DecoderState& state, std::size_t max_iterations);
  friend void revert(DecoderState& state, std::span<const ElementId> elements);

  std::uint32_t rows_ = 0;
  std::uint32_t weight_ = 0;
  std::vector<ElementId> ids_;
  SupportTable supports_;
  std::vector<std::uint32_t> rev_offsets_;
  std::vector<std::uint32_t> rev_entries_;

  std::vector<std::int64_t> residue_;
  std::vector<std::int64_t> base_residue_;
  std::vector<std::uint8_t> base_signal_;
  std::size_t nonzero_rows_ = 0;
  std::vector<std::uint8_t> signal_;
  std::size_t ones_ = 0;
  std::vector<std::int64_t> numerator_;
  std::vector<std::uint8_t> gate_;
  bool tentative_mode_ = false;
  std::vector<std::uint32_t> tentative_;

  Pursuit queue_mode_ = Pursuit::none;
  std::vector<QueueKey> heap_;  // lazy: entries not matching queued_gain_ are stale
  std::size_t live_ = 0;
  std::vector<std::int64_t> queued_gain_;
  std::vector<std::uint8_t> queued_;
  std::vector<std::uint32_t> stamp_;
  std::uint32_t epoch_ = 0;
  std::vector<std::uint32_t> touched_scratch_;

  std::vector<SignalUpdate> log_;
  std::uint64_t iterations_ = 0;
  std::uint64_t touched_total_ = 0;
};

/// Binary matching pursuit with L2 steps: repeatedly applies the best
/// admissible flip (0 -> 1 when the step exceeds 1/2, 1 -> 0 when it is below
/// -1/2) until the residue is zero, no flip is admissible, or the cap is hit.
DecodeOutcome mp_decode(DecoderState& state, std::size_t max_iterations);

/// Sequential sparse matching pursuit with L1 (median) steps quantized to
/// binary flips. Each flip strictly reduces the L1 residue.
DecodeOutcome ssmp_decode(DecoderState& state, std::size_t max_iterations);

/// Clears the signal of each element and re-credits its column to the
/// residue. Throws Error(protocol_error) if an element is not currently set.
void revert(DecoderState& state, std::span<const ElementId> elements);

}  // namespace commonsense
