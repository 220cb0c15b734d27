#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <unordered_map>
#include <vector>

#include "commonsense/element.hpp"

namespace commonsense {

/// Implicit description of an l x 2^u sparse binary sensing matrix whose
/// columns each carry exactly m ones at pseudo-random rows.
struct MatrixSpec {
  std::uint32_t rows = 0;             // l
  std::uint32_t ones_per_column = 0;  // m, serialized as u8
  std::uint64_t seed = 0;
  std::uint32_t universe_bits = 64;   // u, serialized as u16

  /// Throws Error(invalid_argument) unless 1 <= m <= min(l, 255) and 1 <= u <= 256.
  void validate() const;

  friend bool operator==(const MatrixSpec&, const MatrixSpec&) = default;
};

/// Serialized size of a MatrixSpec header: l u32, m u8, seed u64, u u16.
inline constexpr std::size_t kMatrixSpecWireBytes = 15;

/// Anything that can produce the support (set of one-rows) of a column.
class ColumnSource {
 public:
  virtual ~ColumnSource() = default;
  virtual std::uint32_t rows() const noexcept = 0;
  virtual std::uint32_t weight() const noexcept = 0;
  /// Writes the m sorted, distinct row indices of column `id` into `out` (size m).
  virtual void support(const ElementId& id, std::span<std::uint32_t> out) const = 0;
};

/// The hashed implicit construction: rows are drawn by keyed rejection sampling.
class HashedColumns final : public ColumnSource {
 public:
  explicit HashedColumns(const MatrixSpec& spec);

  std::uint32_t rows() const noexcept override { return spec_.rows; }
  std::uint32_t weight() const noexcept override { return spec_.ones_per_column; }
  void support(const ElementId& id, std::span<std::uint32_t> out) const override;

  const MatrixSpec& spec() const noexcept { return spec_; }

 private:
  MatrixSpec spec_;
  std::uint64_t digest_key_;
  std::uint64_t column_key_;
};

/// Explicitly tabulated columns, for worked examples and adversarial tests.
class ExplicitColumns final : public ColumnSource {
 public:
  ExplicitColumns(std::uint32_t rows, std::uint32_t weight);

  /// Registers the support of `id`; throws if its size differs from the weight
  /// or it contains out-of-range / repeated rows.
  void set(const ElementId& id, std::vector<std::uint32_t> rows);

  std::uint32_t rows() const noexcept override { return rows_; }
  std::uint32_t weight() const noexcept override { return weight_; }
  void support(const ElementId& id, std::span<std::uint32_t> out) const override;

 private:
  std::uint32_t rows_;
  std::uint32_t weight_;
  std::unordered_map<ElementId, std::vector<std::uint32_t>, ElementIdHash> columns_;
};

/// Sorted support of one column of the hashed matrix.
std::vector<std::uint32_t> column_support(const MatrixSpec& spec, const ElementId& id);

/// The k-subset of {0..n-1} at position `rank` in lexicographic order.
/// Throws if C(n, k) overflows 64 bits or rank >= C(n, k).
std::vector<std::uint32_t> unrank_combination(std::uint32_t n, std::uint32_t k, std::uint64_t rank);
/// Inverse of unrank_combination for a sorted subset.
std::uint64_t rank_combination(std::uint32_t n, std::span<const std::uint32_t> subset);

/// Supports of a fixed candidate list, stored flat (m entries per candidate).
class SupportTable {
 public:
  SupportTable() = default;
  SupportTable(const ColumnSource& columns, std::span<const ElementId> ids);

  std::span<const std::uint32_t> operator[](std::size_t i) const noexcept {
    return {flat_.data() + i * weight_, weight_};
  }
  std::size_t size() const noexcept { return weight_ == 0 ? 0 : flat_.size() / weight_; }
  std::uint32_t weight() const noexcept { return weight_; }
  std::uint32_t rows() const noexcept { return rows_; }

 private:
  std::uint32_t rows_ = 0;
  std::uint32_t weight_ = 0;
  std::vector<std::uint32_t> flat_;
};

struct EnumerationBudget {
  std::uint64_t max_subsets = 1'000'000;
  std::uint64_t max_sign_vectors = 10'000'000;
};

/// True iff every set S of at most 2d candidate columns touches at least
/// (5/6) m |S| distinct rows. Throws Error(budget_exceeded) when the number
/// of subsets exceeds the budget.
bool check_expander(const ColumnSource& columns, std::span<const ElementId> candidates,
                    unsigned d, const EnumerationBudget& budget = {});

/// True iff (2/3) m |v|_1 <= |Mv|_1 <= m |v|_1 for every v in {-1,0,+1}^n with
/// at most 2d nonzeros on the candidate columns.
bool check_rip1(const ColumnSource& columns, std::span<const ElementId> candidates,
                unsigned d, const EnumerationBudget& budget = {});

}  // namespace commonsense
