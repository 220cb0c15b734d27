#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "commonsense/element.hpp"
#include "commonsense/matrix.hpp"

namespace commonsense {

/// A measurement vector M 1_S together with the net number of elements folded in.
struct Sketch {
  MatrixSpec spec;
  std::vector<std::int64_t> values;
  std::int64_t element_count = 0;

  friend bool operator==(const Sketch&, const Sketch&) = default;
};

/// Measurement left after subtracting decoded columns; zero means fully explained.
struct Residue {
  MatrixSpec spec;
  std::vector<std::int64_t> values;

  bool is_zero() const noexcept;
  std::int64_t l1_norm() const noexcept;

  friend bool operator==(const Residue&, const Residue&) = default;
};

Sketch empty_sketch(const MatrixSpec& spec);

/// Batch encoding over the hashed matrix described by `spec`.
Sketch encode_set(const MatrixSpec& spec, std::span<const ElementId> elements);
/// Batch encoding over an arbitrary column source; `spec` only labels the result.
Sketch encode_set(const MatrixSpec& spec, const ColumnSource& columns,
                  std::span<const ElementId> elements);
/// Batch encoding from precomputed supports.
Sketch encode_supports(const MatrixSpec& spec, const SupportTable& supports);

/// Streaming insertion (sign = +1) or deletion (sign = -1) of one element. O(m).
void update(Sketch& sketch, const ElementId& element, int sign);
void update(Sketch& sketch, const ColumnSource& columns, const ElementId& element, int sign);

/// Coordinate-wise bob - alice. Throws Error(spec_mismatch) on incompatible specs.
Residue residue_between(const Sketch& bob, const Sketch& alice);

/// Coordinate-wise sum (sketch of the multiset union). Throws on spec mismatch.
Sketch add(const Sketch& a, const Sketch& b);

}  // namespace commonsense
