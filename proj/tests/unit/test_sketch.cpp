#include <doctest.h>

#include <random>
#include <set>

#include "commonsense/error.hpp"
#include "commonsense/sketch.hpp"

using namespace commonsense;

TEST_SUITE("sketch") {

TEST_CASE("empty set encodes to zero") {
  const MatrixSpec spec{64, 5, 3, 64};
  const Sketch s = encode_set(spec, std::vector<ElementId>{});
  CHECK(s == empty_sketch(spec));
  CHECK(s.element_count == 0);
}

TEST_CASE("each element adds m to the total") {
  const MatrixSpec spec{128, 6, 1, 64};
  std::vector<ElementId> set;
  for (std::uint64_t i = 0; i < 500; ++i) set.emplace_back(i * 31 + 7);
  const Sketch s = encode_set(spec, set);
  std::int64_t total = 0;
  for (auto v : s.values) total += v;
  CHECK(total == 6 * 500);
  CHECK(s.element_count == 500);
}

TEST_CASE("encoding is linear") {
  const MatrixSpec spec{200, 7, 8, 64};
  std::vector<ElementId> a, b, both;
  for (std::uint64_t i = 0; i < 300; ++i) (i % 3 ? a : b).emplace_back(i);
  both = a;
  both.insert(both.end(), b.begin(), b.end());
  CHECK(add(encode_set(spec, a), encode_set(spec, b)) == encode_set(spec, both));
  const Residue r = residue_between(encode_set(spec, both), encode_set(spec, a));
  CHECK(r.values == encode_set(spec, b).values);
}

TEST_CASE("residue of identical sets is zero") {
  const MatrixSpec spec{50, 3, 2, 64};
  std::vector<ElementId> set{ElementId{1}, ElementId{2}, ElementId{3}};
  const Residue r = residue_between(encode_set(spec, set), encode_set(spec, set));
  CHECK(r.is_zero());
  CHECK(r.l1_norm() == 0);
}

TEST_CASE("mismatched specs are rejected") {
  const Sketch a = empty_sketch({50, 3, 2, 64});
  const Sketch b = empty_sketch({50, 3, 4, 64});
  CHECK_THROWS_AS(residue_between(a, b), Error);
  CHECK_THROWS_AS(add(a, b), Error);
}

TEST_CASE("interleaved stream matches the batch sketch") {
  const MatrixSpec spec{1000, 7, 77, 64};
  Sketch digest = empty_sketch(spec);
  std::set<std::uint64_t> live;
  std::mt19937_64 rng(5);
  for (int op = 0; op < 10000; ++op) {
    const bool remove = !live.empty() && rng() % 3 == 0;
    if (remove) {
      auto it = live.begin();
      std::advance(it, static_cast<long>(rng() % live.size()));
      update(digest, ElementId{*it}, -1);
      live.erase(it);
    } else {
      std::uint64_t x = rng();
      if (live.insert(x).second) update(digest, ElementId{x}, +1);
    }
  }
  std::vector<ElementId> final_set;
  for (auto x : live) final_set.emplace_back(x);
  CHECK(digest == encode_set(spec, final_set));
}

TEST_CASE("update rejects bad signs") {
  Sketch s = empty_sketch({20, 2, 0, 64});
  CHECK_THROWS_AS(update(s, ElementId{1}, 2), Error);
}

TEST_CASE("support-table encoding equals hashed encoding") {
  const MatrixSpec spec{333, 4, 12, 64};
  std::vector<ElementId> set;
  for (std::uint64_t i = 0; i < 100; ++i) set.emplace_back(i * i + 1);
  HashedColumns cols(spec);
  CHECK(encode_supports(spec, SupportTable(cols, set)) == encode_set(spec, set));
}

}  // TEST_SUITE
