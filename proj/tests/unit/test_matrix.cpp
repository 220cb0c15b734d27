#include <doctest.h>

#include <algorithm>
#include <map>
#include <random>
#include <set>

#include "commonsense/error.hpp"
#include "commonsense/matrix.hpp"

using namespace commonsense;

namespace {

ExplicitColumns worked_example_matrix() {
  ExplicitColumns cols(7, 3);
  cols.set(ElementId{1}, {0, 1, 2});
  cols.set(ElementId{2}, {0, 3, 4});
  cols.set(ElementId{3}, {0, 5, 6});
  return cols;
}

std::vector<ElementId> ids(std::uint64_t first, std::size_t n) {
  std::vector<ElementId> out;
  for (std::size_t i = 0; i < n; ++i) out.emplace_back(first + i);
  return out;
}

}  // namespace

TEST_SUITE("matrix") {

TEST_CASE("spec validation") {
  CHECK_NOTHROW((MatrixSpec{16, 4, 1, 64}.validate()));
  CHECK_THROWS_AS((MatrixSpec{16, 0, 1, 64}.validate()), Error);
  CHECK_THROWS_AS((MatrixSpec{3, 4, 1, 64}.validate()), Error);
  CHECK_THROWS_AS((MatrixSpec{1000, 256, 1, 64}.validate()), Error);
  CHECK_THROWS_AS((MatrixSpec{16, 4, 1, 0}.validate()), Error);
  CHECK_THROWS_AS((MatrixSpec{16, 4, 1, 257}.validate()), Error);
}

TEST_CASE("column supports are sorted, distinct, in range and deterministic") {
  const MatrixSpec spec{97, 7, 42, 64};
  HashedColumns cols(spec);
  std::vector<std::uint32_t> a(7), b(7);
  for (std::uint64_t x = 0; x < 2000; ++x) {
    cols.support(ElementId{x}, a);
    CHECK(std::is_sorted(a.begin(), a.end()));
    CHECK(std::adjacent_find(a.begin(), a.end()) == a.end());
    CHECK(a.back() < spec.rows);
    cols.support(ElementId{x}, b);
    CHECK(a == b);
    CHECK(column_support(spec, ElementId{x}) == a);
  }
}

TEST_CASE("seed changes the matrix") {
  const auto a = column_support({1000, 7, 1, 64}, ElementId{5});
  const auto b = column_support({1000, 7, 2, 64}, ElementId{5});
  CHECK(a != b);
}

TEST_CASE("wide ids use every limb") {
  const MatrixSpec spec{1000, 5, 3, 256};
  const ElementId lo{std::array<std::uint64_t, 4>{7, 0, 0, 0}};
  const ElementId hi{std::array<std::uint64_t, 4>{7, 0, 0, 1}};
  CHECK(column_support(spec, lo) != column_support(spec, hi));
}

TEST_CASE("unrank enumerates k-subsets in lexicographic order") {
  for (std::uint32_t n = 1; n <= 9; ++n) {
    for (std::uint32_t k = 1; k <= n; ++k) {
      // Oracle: lexicographic subsets from a selector permutation.
      std::vector<int> sel(n, 0);
      std::fill(sel.begin(), sel.begin() + k, 1);
      std::uint64_t rank = 0;
      do {
        std::vector<std::uint32_t> subset;
        for (std::uint32_t i = 0; i < n; ++i)
          if (sel[i]) subset.push_back(i);
        CHECK(unrank_combination(n, k, rank) == subset);
        CHECK(rank_combination(n, subset) == rank);
        ++rank;
      } while (std::prev_permutation(sel.begin(), sel.end()));
      CHECK_THROWS_AS(unrank_combination(n, k, rank), Error);
    }
  }
}

TEST_CASE("rows are used uniformly") {
  const MatrixSpec spec{50, 5, 9, 64};
  HashedColumns cols(spec);
  std::vector<double> hits(spec.rows, 0.0);
  std::vector<std::uint32_t> s(5);
  const std::size_t n = 20000;
  for (std::uint64_t x = 0; x < n; ++x) {
    cols.support(ElementId{x * 0x9e3779b97f4a7c15ULL}, s);
    for (auto r : s) hits[r] += 1;
  }
  const double expect = static_cast<double>(n) * 5 / 50;
  double chi2 = 0;
  for (double h : hits) chi2 += (h - expect) * (h - expect) / expect;
  // 99.9% quantile of chi-square with 49 degrees of freedom.
  CHECK(chi2 < 85.4);
}

TEST_CASE("supports are uniform over m-subsets") {
  const MatrixSpec spec{8, 3, 11, 64};
  HashedColumns cols(spec);
  std::map<std::vector<std::uint32_t>, double> freq;
  std::vector<std::uint32_t> s(3);
  const std::size_t n = 56000;
  for (std::uint64_t x = 0; x < n; ++x) {
    cols.support(ElementId{x}, s);
    freq[s] += 1;
  }
  REQUIRE(freq.size() == 56);
  double chi2 = 0;
  for (auto& [k, f] : freq) chi2 += (f - 1000.0) * (f - 1000.0) / 1000.0;
  // 99.9% quantile of chi-square with 55 degrees of freedom.
  CHECK(chi2 < 93.2);
}

TEST_CASE("explicit columns validate their input") {
  ExplicitColumns cols(5, 2);
  CHECK_THROWS_AS(cols.set(ElementId{1}, {0}), Error);
  CHECK_THROWS_AS(cols.set(ElementId{1}, {0, 5}), Error);
  CHECK_THROWS_AS(cols.set(ElementId{1}, {3, 3}), Error);
  cols.set(ElementId{1}, {4, 1});
  std::vector<std::uint32_t> s(2);
  cols.support(ElementId{1}, s);
  CHECK(s == std::vector<std::uint32_t>{1, 4});
  CHECK_THROWS_AS(cols.support(ElementId{2}, s), Error);
}

TEST_CASE("worked example matrix is an expander for d = 1 only") {
  const auto cols = worked_example_matrix();
  const auto cand = ids(1, 3);
  CHECK(check_expander(cols, cand, 1));
  CHECK_FALSE(check_expander(cols, cand, 2));
  CHECK(check_rip1(cols, cand, 1));
}

TEST_CASE("rip1 oracle on a hand-built pair") {
  // Two columns sharing two of three rows: |m1 - m2|_1 = 2 < (2/3) 3 2.
  ExplicitColumns cols(4, 3);
  cols.set(ElementId{1}, {0, 1, 2});
  cols.set(ElementId{2}, {0, 1, 3});
  const auto cand = ids(1, 2);
  CHECK_FALSE(check_rip1(cols, cand, 1));
  CHECK_FALSE(check_expander(cols, cand, 1));
}

TEST_CASE("expander implies rip1 on random small specs") {
  std::mt19937_64 rng(2024);
  int expanders = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const std::uint32_t m = 1 + rng() % 4;
    const std::uint32_t l = std::max<std::uint32_t>(m, 8 + rng() % 17);
    const std::size_t n = 2 + rng() % 15;
    const unsigned d = 1 + rng() % 2;
    HashedColumns cols({l, m, rng(), 64});
    const auto cand = ids(rng() % 1000000, n);
    if (check_expander(cols, cand, d)) {
      ++expanders;
      CHECK(check_rip1(cols, cand, d));
    }
  }
  CHECK(expanders > 0);
}

TEST_CASE("enumeration budget is enforced") {
  HashedColumns cols({64, 4, 1, 64});
  const auto cand = ids(0, 200);
  CHECK_THROWS_AS(check_expander(cols, cand, 3, {1000, 1000}), Error);
  CHECK_THROWS_AS(check_rip1(cols, cand, 3, {1000, 1000}), Error);
}

TEST_CASE("support table matches per-column supports") {
  const MatrixSpec spec{300, 6, 5, 64};
  HashedColumns cols(spec);
  const auto cand = ids(1000, 64);
  SupportTable table(cols, cand);
  REQUIRE(table.size() == cand.size());
  for (std::size_t i = 0; i < cand.size(); ++i) {
    const auto s = table[i];
    CHECK(std::vector<std::uint32_t>(s.begin(), s.end()) == column_support(spec, cand[i]));
  }
}

}  // TEST_SUITE
