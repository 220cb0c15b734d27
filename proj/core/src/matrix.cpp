#include "commonsense/matrix.hpp"

#include <algorithm>
#include <functional>

#include "commonsense/error.hpp"
#include "commonsense/hashing.hpp"

namespace commonsense {

void MatrixSpec::validate() const {
  if (rows == 0) throw Error(Errc::invalid_argument, "matrix must have at least one row");
  if (ones_per_column == 0 || ones_per_column > 255)
    throw Error(Errc::invalid_argument, "ones_per_column must be in [1, 255]");
  if (ones_per_column > rows) throw Error(Errc::invalid_argument, "ones_per_column exceeds rows");
  if (universe_bits == 0 || universe_bits > 256)
    throw Error(Errc::invalid_argument, "universe_bits must be in [1, 256]");
}

HashedColumns::HashedColumns(const MatrixSpec& spec)
    : spec_(spec),
      digest_key_(derive_key(spec.seed, HashDomain::element_digest)),
      column_key_(derive_key(spec.seed, HashDomain::column)) {
  spec_.validate();
}

void HashedColumns::support(const ElementId& id, std::span<std::uint32_t> out) const {
  const Digest128 dg = digest128(digest_key_, id);
  const std::uint32_t m = spec_.ones_per_column;
  std::uint32_t filled = 0;
  for (std::uint64_t draw = 0; filled < m; ++draw) {
    std::uint64_t w = mix64(dg.lo ^ mix64(dg.hi + column_key_ + draw * 0x9e3779b97f4a7c15ULL));
    std::uint32_t row = reduce_range(w, spec_.rows);
    bool seen = false;
    for (std::uint32_t j = 0; j < filled; ++j) {
      if (out[j] == row) {
        seen = true;
        break;
      }
    }
    if (!seen) out[filled++] = row;
  }
  std::sort(out.begin(), out.begin() + m);
}

ExplicitColumns::ExplicitColumns(std::uint32_t rows, std::uint32_t weight)
    : rows_(rows), weight_(weight) {
  if (weight == 0 || weight > rows) throw Error(Errc::invalid_argument, "bad explicit matrix shape");
}

void ExplicitColumns::set(const ElementId& id, std::vector<std::uint32_t> rows) {
  if (rows.size() != weight_) throw Error(Errc::invalid_argument, "support size differs from weight");
  std::sort(rows.begin(), rows.end());
  if (std::adjacent_find(rows.begin(), rows.end()) != rows.end())
    throw Error(Errc::invalid_argument, "repeated row in support");
  if (!rows.empty() && rows.back() >= rows_) throw Error(Errc::invalid_argument, "row out of range");
  columns_[id] = std::move(rows);
}

void ExplicitColumns::support(const ElementId& id, std::span<std::uint32_t> out) const {
  auto it = columns_.find(id);
  if (it == columns_.end()) throw Error(Errc::invalid_argument, "column not tabulated: " + id.to_hex());
  std::copy(it->second.begin(), it->second.end(), out.begin());
}

std::vector<std::uint32_t> column_support(const MatrixSpec& spec, const ElementId& id) {
  HashedColumns cols(spec);
  std::vector<std::uint32_t> out(spec.ones_per_column);
  cols.support(id, out);
  return out;
}

namespace {

// C(n, k), or 0 on 64-bit overflow.
std::uint64_t binomial(std::uint64_t n, std::uint64_t k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  uint128 acc = 1;
  for (std::uint64_t i = 1; i <= k; ++i) {
    acc = acc * (n - k + i) / i;
    if (acc > UINT64_MAX) return 0;
  }
  return static_cast<std::uint64_t>(acc);
}

std::uint64_t checked_binomial(std::uint64_t n, std::uint64_t k) {
  if (k > n) return 0;
  std::uint64_t b = binomial(n, k);
  if (b == 0) throw Error(Errc::invalid_argument, "binomial coefficient overflows 64 bits");
  return b;
}

}  // namespace

std::vector<std::uint32_t> unrank_combination(std::uint32_t n, std::uint32_t k, std::uint64_t rank) {
  if (k > n) throw Error(Errc::invalid_argument, "k exceeds n");
  if (rank >= checked_binomial(n, k)) throw Error(Errc::invalid_argument, "rank out of range");
  std::vector<std::uint32_t> out;
  out.reserve(k);
  std::uint32_t next = 0;
  for (std::uint32_t slot = 0; slot < k; ++slot) {
    // Skip candidates whose block of completions lies entirely below `rank`.
    for (;; ++next) {
      std::uint64_t block = checked_binomial(n - next - 1, k - slot - 1);
      if (rank < block) break;
      rank -= block;
    }
    out.push_back(next++);
  }
  return out;
}

std::uint64_t rank_combination(std::uint32_t n, std::span<const std::uint32_t> subset) {
  const auto k = static_cast<std::uint32_t>(subset.size());
  std::uint64_t rank = 0;
  std::uint32_t next = 0;
  for (std::uint32_t slot = 0; slot < k; ++slot) {
    for (; next < subset[slot]; ++next) rank += checked_binomial(n - next - 1, k - slot - 1);
    ++next;
  }
  return rank;
}

SupportTable::SupportTable(const ColumnSource& columns, std::span<const ElementId> ids)
    : rows_(columns.rows()), weight_(columns.weight()), flat_(ids.size() * columns.weight()) {
  for (std::size_t i = 0; i < ids.size(); ++i) {
    columns.support(ids[i], std::span<std::uint32_t>(flat_.data() + i * weight_, weight_));
  }
}

namespace {

std::uint64_t count_subsets(std::size_t n, unsigned max_size, std::uint64_t per_subset_factor) {
  std::uint64_t total = 0;
  for (unsigned k = 1; k <= max_size && k <= n; ++k) {
    std::uint64_t b = binomial(n, k);
    std::uint64_t mult = per_subset_factor == 2 ? (1ULL << std::min(k, 63U)) : 1;
    if (b == 0 || b > UINT64_MAX / mult) return UINT64_MAX;
    std::uint64_t add = b * mult;
    if (total > UINT64_MAX - add) return UINT64_MAX;
    total += add;
  }
  return total;
}

// Visits every nonempty subset of {0..n-1} with at most `max_size` members.
// The visitor returns false to stop early.
bool for_each_subset(std::size_t n, unsigned max_size,
                     const std::function<bool(std::span<const std::size_t>)>& visit) {
  std::vector<std::size_t> chosen;
  std::function<bool(std::size_t)> rec = [&](std::size_t start) -> bool {
    for (std::size_t i = start; i < n; ++i) {
      chosen.push_back(i);
      if (!visit(chosen)) return false;
      if (chosen.size() < max_size && !rec(i + 1)) return false;
      chosen.pop_back();
    }
    return true;
  };
  return rec(0);
}

}  // namespace

bool check_expander(const ColumnSource& columns, std::span<const ElementId> candidates, unsigned d,
                    const EnumerationBudget& budget) {
  const unsigned max_size = 2 * d;
  if (count_subsets(candidates.size(), max_size, 1) > budget.max_subsets)
    throw Error(Errc::budget_exceeded, "expander check would enumerate too many subsets");
  SupportTable table(columns, candidates);
  const std::uint64_t m = columns.weight();
  std::vector<std::uint32_t> hits(columns.rows(), 0);
  return for_each_subset(candidates.size(), max_size, [&](std::span<const std::size_t> s) {
    std::uint64_t distinct = 0;
    for (std::size_t i : s)
      for (std::uint32_t r : table[i])
        if (hits[r]++ == 0) ++distinct;
    for (std::size_t i : s)
      for (std::uint32_t r : table[i]) hits[r] = 0;
    // distinct >= (5/6) m |S|
    return 6 * distinct >= 5 * m * s.size();
  });
}

bool check_rip1(const ColumnSource& columns, std::span<const ElementId> candidates, unsigned d,
                const EnumerationBudget& budget) {
  const unsigned max_size = 2 * d;
  if (count_subsets(candidates.size(), max_size, 2) > budget.max_sign_vectors)
    throw Error(Errc::budget_exceeded, "RIP-1 check would enumerate too many sign vectors");
  SupportTable table(columns, candidates);
  const std::int64_t m = columns.weight();
  std::vector<std::int64_t> image(columns.rows(), 0);
  return for_each_subset(candidates.size(), max_size, [&](std::span<const std::size_t> s) {
    const std::size_t k = s.size();
    for (std::uint64_t signs = 0; signs < (1ULL << k); ++signs) {
      for (std::size_t j = 0; j < k; ++j) {
        std::int64_t sign = (signs >> j) & 1U ? -1 : 1;
        for (std::uint32_t r : table[s[j]]) image[r] += sign;
      }
      std::int64_t norm = 0;
      for (std::size_t j = 0; j < k; ++j)
        for (std::uint32_t r : table[s[j]]) {
          norm += image[r] < 0 ? -image[r] : image[r];
          // Each row is counted once: zero it after reading.
          image[r] = 0;
        }
      const auto vnorm = static_cast<std::int64_t>(k);
      if (3 * norm < 2 * m * vnorm || norm > m * vnorm) return false;
    }
    return true;
  });
}

}  // namespace commonsense
