#include "commonsense/decoder.hpp"

#include <algorithm>
#include <cstdlib>
#include <stdexcept>

#include "commonsense/error.hpp"

namespace commonsense {

std::int64_t delta_numerator(std::span<const std::int64_t> residue, std::span<const std::uint32_t> support) {
  std::int64_t sum = 0;
  for (std::uint32_t r : support) sum += residue[r];
  return sum;
}

double delta(const Residue& residue, const ColumnSource& columns, const ElementId& element) {
  std::vector<std::uint32_t> rows(columns.weight());
  columns.support(element, rows);
  return static_cast<double>(delta_numerator(residue.values, rows)) / static_cast<double>(rows.size());
}

double median_step(std::span<const std::int64_t> residue, std::span<const std::uint32_t> support) {
  std::vector<std::int64_t> v;
  v.reserve(support.size());
  for (std::uint32_t r : support) v.push_back(residue[r]);
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  if (n == 0) return 0.0;
  if (n % 2 == 1) return static_cast<double>(v[n / 2]);
  return (static_cast<double>(v[n / 2 - 1]) + static_cast<double>(v[n / 2])) / 2.0;
}

const char* to_string(DecodeOutcome outcome) noexcept {
  switch (outcome) {
    case DecodeOutcome::zero_residue: return "zero_residue";
    case DecodeOutcome::stalled: return "stalled";
    case DecodeOutcome::iteration_cap: return "iteration_cap";
  }
  return "unknown";
}

DecoderState::DecoderState(const ColumnSource& columns, std::vector<ElementId> candidates,
                           std::vector<std::int64_t> residue)
    : rows_(columns.rows()), weight_(columns.weight()), ids_(std::move(candidates)) {
  if (residue.size() != rows_) throw Error(Errc::spec_mismatch, "residue length differs from matrix rows");
  std::sort(ids_.begin(), ids_.end());
  if (std::adjacent_find(ids_.begin(), ids_.end()) != ids_.end())
    throw Error(Errc::invalid_argument, "duplicate decoder candidate");
  if (ids_.size() >= UINT32_MAX) throw Error(Errc::invalid_argument, "too many candidates");
  supports_ = SupportTable(columns, ids_);

  const std::size_t n = ids_.size();
  rev_offsets_.assign(rows_ + 1, 0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::uint32_t r : supports_[i]) ++rev_offsets_[r + 1];
  for (std::uint32_t r = 0; r < rows_; ++r) rev_offsets_[r + 1] += rev_offsets_[r];
  rev_entries_.resize(rev_offsets_.back());
  std::vector<std::uint32_t> cursor(rev_offsets_.begin(), rev_offsets_.end() - 1);
  for (std::size_t i = 0; i < n; ++i)
    for (std::uint32_t r : supports_[i]) rev_entries_[cursor[r]++] = static_cast<std::uint32_t>(i);

  signal_.assign(n, 0);
  gate_.assign(n, static_cast<std::uint8_t>(AdditionGate::open));
  queued_.assign(n, 0);
  queued_gain_.assign(n, 0);
  stamp_.assign(n, 0);
  numerator_.assign(n, 0);
  set_residue(std::move(residue));
}

std::optional<std::size_t> DecoderState::index_of(const ElementId& id) const {
  auto it = std::lower_bound(ids_.begin(), ids_.end(), id);
  if (it == ids_.end() || !(*it == id)) return std::nullopt;
  return static_cast<std::size_t>(it - ids_.begin());
}

std::int64_t DecoderState::residue_l1() const noexcept {
  std::int64_t total = 0;
  for (std::int64_t v : residue_) total += std::llabs(v);
  return total;
}

std::vector<ElementId> DecoderState::recovered() const {
  std::vector<ElementId> out;
  out.reserve(ones_);
  for (std::size_t i = 0; i < ids_.size(); ++i)
    if (signal_[i]) out.push_back(ids_[i]);
  return out;
}

void DecoderState::set_residue(std::vector<std::int64_t> residue) {
  if (residue.size() != rows_) throw Error(Errc::spec_mismatch, "residue length differs from matrix rows");
  residue_ = std::move(residue);
  base_residue_ = residue_;
  base_signal_ = signal_;
  nonzero_rows_ = static_cast<std::size_t>(
      std::count_if(residue_.begin(), residue_.end(), [](std::int64_t v) { return v != 0; }));
  for (std::size_t i = 0; i < ids_.size(); ++i) numerator_[i] = delta_numerator(residue_, supports_[i]);
  queue_mode_ = Pursuit::none;
}

void DecoderState::set_gate(std::size_t i, AdditionGate gate) {
  if (gate_[i] != static_cast<std::uint8_t>(gate)) {
    gate_[i] = static_cast<std::uint8_t>(gate);
    queue_mode_ = Pursuit::none;
  }
}

void DecoderState::set_tentative_mode(bool on) {
  if (tentative_mode_ != on) {
    tentative_mode_ = on;
    queue_mode_ = Pursuit::none;
  }
}

bool DecoderState::addition_allowed(std::size_t i) const noexcept {
  const auto g = static_cast<AdditionGate>(gate_[i]);
  return g == AdditionGate::open || (g == AdditionGate::filtered && tentative_mode_);
}

std::int64_t DecoderState::gain(std::size_t i) const noexcept {
  if (queue_mode_ == Pursuit::l1) {
    // L1 reduction of the unit step: rows moving towards zero minus rows moving away.
    std::int64_t toward = 0;
    for (std::uint32_t r : supports_[i]) {
      const std::int64_t v = residue_[r];
      if (signal_[i] ? v <= -1 : v >= 1) ++toward;
    }
    return 2 * toward - static_cast<std::int64_t>(weight_);
  }
  return signal_[i] ? -numerator_[i] : numerator_[i];
}

bool DecoderState::eligible(std::size_t i, std::int64_t g) const noexcept {
  if (!signal_[i] && !addition_allowed(i)) return false;
  if (queue_mode_ == Pursuit::l1) return g > 0;
  // Step beyond +-1/2, compared on integer numerators: |num| / m > 1/2.
  return 2 * g > static_cast<std::int64_t>(weight_);
}

void DecoderState::rebuild_queue(Pursuit mode) {
  heap_.clear();
  live_ = 0;
  std::fill(queued_.begin(), queued_.end(), 0);
  queue_mode_ = mode;
  for (std::size_t i = 0; i < ids_.size(); ++i) {
    const std::int64_t g = gain(i);
    if (eligible(i, g)) {
      heap_.push_back({g, static_cast<std::uint32_t>(i)});
      queued_[i] = 1;
      queued_gain_[i] = g;
      ++live_;
    }
  }
  std::make_heap(heap_.begin(), heap_.end(), QueueOrder{});
}

void DecoderState::enqueue(std::uint32_t i, std::int64_t g) {
  queued_[i] = 1;
  queued_gain_[i] = g;
  ++live_;
  heap_.push_back({g, i});
  std::push_heap(heap_.begin(), heap_.end(), QueueOrder{});
}

void DecoderState::compact_queue() {
  heap_.clear();
  for (std::size_t i = 0; i < ids_.size(); ++i)
    if (queued_[i]) heap_.push_back({queued_gain_[i], static_cast<std::uint32_t>(i)});
  std::make_heap(heap_.begin(), heap_.end(), QueueOrder{});
}

std::optional<std::size_t> DecoderState::best_queued() {
  while (!heap_.empty()) {
    const QueueKey top = heap_.front();
    if (queued_[top.index] && queued_gain_[top.index] == top.gain) return top.index;
    std::pop_heap(heap_.begin(), heap_.end(), QueueOrder{});
    heap_.pop_back();
  }
  return std::nullopt;
}

void DecoderState::apply(std::size_t i, int direction) {
  if (++epoch_ == 0) {
    std::fill(stamp_.begin(), stamp_.end(), 0);
    epoch_ = 1;
  }
  touched_scratch_.clear();
  const auto support = supports_[i];
  for (std::uint32_t r : support) {
    for (std::uint32_t k = rev_offsets_[r]; k < rev_offsets_[r + 1]; ++k) {
      const std::uint32_t j = rev_entries_[k];
      if (stamp_[j] == epoch_) continue;
      stamp_[j] = epoch_;
      touched_scratch_.push_back(j);
      if (queued_[j]) {
        queued_[j] = 0;
        --live_;
      }
    }
  }
  for (std::uint32_t r : support) {
    const std::int64_t before = residue_[r];
    const std::int64_t after = before - direction;
    residue_[r] = after;
    if (before == 0) ++nonzero_rows_;
    if (after == 0) --nonzero_rows_;
    for (std::uint32_t k = rev_offsets_[r]; k < rev_offsets_[r + 1]; ++k) numerator_[rev_entries_[k]] -= direction;
  }
  signal_[i] = direction > 0 ? 1 : 0;
  if (direction > 0) {
    ++ones_;
    if (gate_[i] == static_cast<std::uint8_t>(AdditionGate::filtered))
      tentative_.push_back(static_cast<std::uint32_t>(i));
  } else {
    --ones_;
  }
  log_.push_back({static_cast<std::uint32_t>(i), static_cast<std::int8_t>(direction)});

  if (queue_mode_ != Pursuit::none) {
    for (std::uint32_t j : touched_scratch_) {
      const std::int64_t g = gain(j);
      if (eligible(j, g)) enqueue(j, g);
    }
    if (heap_.size() > 4 * live_ + 4096) compact_queue();
  }
  touched_total_ += touched_scratch_.size();
}

DecodeOutcome DecoderState::run(Pursuit mode, std::size_t max_iterations) {
  if (nonzero_rows_ == 0) return DecodeOutcome::zero_residue;
  if (queue_mode_ != mode) rebuild_queue(mode);
  DecodeOutcome outcome = DecodeOutcome::iteration_cap;
  for (std::size_t n = 0; n < max_iterations; ++n) {
    const auto top = best_queued();
    if (!top) {
      outcome = DecodeOutcome::stalled;
      break;
    }
    const std::size_t best = *top;
    apply(best, signal_[best] ? -1 : +1);
    ++iterations_;
#ifndef NDEBUG
    if (ids_.size() <= 4096 && !bookkeeping_holds())
      throw std::logic_error("decoder bookkeeping identity violated");
#endif
    if (nonzero_rows_ == 0) {
      outcome = DecodeOutcome::zero_residue;
      break;
    }
  }
  if (!bookkeeping_holds()) throw std::logic_error("decoder bookkeeping identity violated");
  return outcome;
}

bool DecoderState::priorities_consistent() const {
  for (std::size_t i = 0; i < ids_.size(); ++i)
    if (numerator_[i] != delta_numerator(residue_, supports_[i])) return false;
  if (queue_mode_ == Pursuit::none) return true;
  std::vector<QueueKey> entries = heap_;
  const auto key_less = [](const QueueKey& a, const QueueKey& b) {
    return a.index != b.index ? a.index < b.index : a.gain < b.gain;
  };
  std::sort(entries.begin(), entries.end(), key_less);
  std::size_t expected = 0;
  for (std::size_t i = 0; i < ids_.size(); ++i) {
    const std::int64_t g = gain(i);
    const bool should = eligible(i, g);
    if (should != (queued_[i] != 0)) return false;
    if (should) {
      ++expected;
      const QueueKey key{g, static_cast<std::uint32_t>(i)};
      if (queued_gain_[i] != g || !std::binary_search(entries.begin(), entries.end(), key, key_less)) return false;
    }
  }
  return expected == live_;
}

bool DecoderState::bookkeeping_holds() const {
  std::vector<std::int64_t> expect = base_residue_;
  for (std::size_t i = 0; i < ids_.size(); ++i) {
    const int diff = static_cast<int>(signal_[i]) - static_cast<int>(base_signal_[i]);
    if (diff == 0) continue;
    for (std::uint32_t r : supports_[i]) expect[r] -= diff;
  }
  return expect == residue_;
}

DecodeOutcome mp_decode(DecoderState& state, std::size_t max_iterations) {
  return state.run(DecoderState::Pursuit::l2, max_iterations);
}

DecodeOutcome ssmp_decode(DecoderState& state, std::size_t max_iterations) {
  return state.run(DecoderState::Pursuit::l1, max_iterations);
}

void revert(DecoderState& state, std::span<const ElementId> elements) {
  std::vector<std::size_t> indices;
  indices.reserve(elements.size());
  for (const ElementId& e : elements) {
    auto idx = state.index_of(e);
    if (!idx || !state.signal(*idx))
      throw Error(Errc::protocol_error, "revert of element that is not decoded: " + e.to_hex());
    indices.push_back(*idx);
  }
  for (std::size_t i : indices) {
    if (!state.signal(i)) throw Error(Errc::protocol_error, "element reverted twice");
    state.apply(i, -1);
  }
}

}  // namespace commonsense
