#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "commonsense/element.hpp"

namespace commonsense {

inline constexpr double kBytesPerKB = 1000.0;
inline double bits_to_kb(double bits) { return bits / 8.0 / kBytesPerKB; }

/// log2 C(n, k) through log-gamma.
double log2_binomial(double n, double k);

/// log2 C(|A|, |A\B|) + log2 C(|B|, |B\A|). Throws Error(invalid_argument)
/// when the cardinalities do not describe two sets with a common intersection.
double setx_lower_bound(std::int64_t size_a, std::int64_t size_b, std::int64_t a_minus_b, std::int64_t b_minus_a);

/// d log2(e 2^u / d).
double setr_lower_bound(std::int64_t d, unsigned universe_bits);

/// Sum of the one-way bounds for each side's unique elements; equals
/// d log2(2 e 2^u / d) when both sides hold d / 2.
double setr_lower_bound_two_sided(std::int64_t a_minus_b, std::int64_t b_minus_a, unsigned universe_bits);

struct IbltParams {
  std::uint32_t cell_count = 0;
  std::uint32_t hash_count = 4;
  unsigned fingerprint_bits = 32;  // 32 or 48
  unsigned universe_bits = 64;
  std::uint64_t seed = 0;

  /// ceil(hedge * d) cells, at least hash_count.
  static IbltParams for_difference(std::int64_t d, unsigned universe_bits, double hedge = 1.36,
                                   std::uint32_t hash_count = 4, unsigned fingerprint_bits = 32,
                                   std::uint64_t seed = 0);
  void validate() const;
  /// count (4 bytes) + id (ceil(u / 8) bytes) + fingerprint.
  std::size_t cell_bytes() const noexcept { return 4 + (universe_bits + 7) / 8 + fingerprint_bits / 8; }
};

struct IbltCell {
  std::int64_t count = 0;
  ElementId id_sum;  // XOR of ids
  std::uint64_t fingerprint_sum = 0;  // XOR of fingerprints

  bool empty() const noexcept { return count == 0 && id_sum == ElementId{} && fingerprint_sum == 0; }
};

struct IbltPeelResult;

class IbltTable {
 public:
  explicit IbltTable(const IbltParams& params);

  void insert(const ElementId& id) { toggle(id, +1); }
  void erase(const ElementId& id) { toggle(id, -1); }

  bool empty() const noexcept;
  const IbltParams& params() const noexcept { return params_; }
  std::span<const IbltCell> cells() const noexcept { return cells_; }
  std::size_t wire_bytes() const noexcept { return cells_.size() * params_.cell_bytes(); }

  /// Distinct cell indices of an element.
  std::vector<std::uint32_t> cells_of(const ElementId& id) const;
  std::uint64_t fingerprint(const ElementId& id) const noexcept;

 private:
  friend IbltTable iblt_subtract(const IbltTable&, const IbltTable&);
  friend IbltPeelResult iblt_peel(IbltTable);

  void toggle(const ElementId& id, int sign);

  IbltParams params_;
  std::uint64_t cell_key_;
  std::uint64_t fp_key_;
  std::vector<IbltCell> cells_;
};

IbltTable iblt_encode(std::span<const ElementId> elements, const IbltParams& params);
/// Cell-wise t1 - t2. Throws Error(spec_mismatch) on different parameters.
IbltTable iblt_subtract(const IbltTable& t1, const IbltTable& t2);

struct IbltPeelResult {
  bool ok = false;
  std::vector<ElementId> positive;  // count +1: in the first table only
  std::vector<ElementId> negative;  // count -1: in the second table only
};

/// Peels pure cells until the table is empty; ok is false if it gets stuck.
IbltPeelResult iblt_peel(IbltTable table);

struct IbltSessionCost {
  bool ok = false;
  std::uint64_t first_message_bytes = 0;   // the sender's table
  std::uint64_t second_message_bytes = 0;  // indices of the sender's unique elements
  std::uint64_t total_bytes() const noexcept { return first_message_bytes + second_message_bytes; }
  std::vector<ElementId> sender_intersection;
  std::vector<ElementId> receiver_intersection;
};

/// Two-message bidirectional exchange: the sender ships its table, the
/// receiver peels the difference and returns |A\B| log2|A| bits of indices.
IbltSessionCost iblt_bidirectional(std::span<const ElementId> sender, std::span<const ElementId> receiver,
                                   const IbltParams& params);

}  // namespace commonsense
