#include <doctest.h>

#include <cmath>
#include <random>

#include "commonsense/error.hpp"
#include "commonsense/smf.hpp"
#include "oracles.hpp"

using namespace commonsense;

namespace {

std::vector<ElementId> random_ids(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<ElementId> out;
  for (std::size_t i = 0; i < n; ++i) out.emplace_back(rng());
  return out;
}

}  // namespace

TEST_SUITE("smf") {

TEST_CASE("no false negatives") {
  const auto set = random_ids(5000, 1);
  const auto f = bf_build(set, 0.01, 3);
  for (const auto& e : set) CHECK(bf_query(f, e));
  CHECK(f.inserted_count() == set.size());
}

TEST_CASE("sizing follows the standard optimum") {
  const auto set = random_ids(1000, 2);
  for (double p : {0.1, 0.01, 0.001}) {
    const auto f = bf_build(set, p, 0);
    const double bits = std::ceil(1000 * std::log2(std::exp(1.0)) * std::log2(1.0 / p));
    CHECK(f.bit_count() == static_cast<std::uint32_t>(bits));
    CHECK(f.hash_count() == static_cast<std::uint8_t>(std::ceil(bits / 1000 * std::log(2.0))));
  }
}

TEST_CASE("false positive rate matches the analytic value") {
  const auto set = random_ids(20000, 4);
  const auto f = bf_build(set, 0.01, 9);
  const auto probes = random_ids(200000, 5);
  std::size_t hits = 0;
  for (const auto& e : probes) hits += bf_query(f, e);
  const double expect = oracle::bloom_fpp(f.bit_count(), f.hash_count(), 20000);
  const double observed = static_cast<double>(hits) / 200000.0;
  const double sigma = std::sqrt(expect * (1 - expect) / 200000.0);
  CHECK(std::abs(observed - expect) < 5 * sigma);
  CHECK(observed < 0.0125);
}

TEST_CASE("serialization round trip") {
  const auto set = random_ids(300, 7);
  const auto f = bf_build(set, 0.02, 0xabc);
  std::vector<std::uint8_t> buf;
  ByteWriter w(buf);
  f.serialize(w);
  CHECK(buf.size() == f.wire_size());
  ByteReader r(buf);
  const auto g = BloomFilter::deserialize(r);
  CHECK(g == f);
  CHECK(r.remaining() == 0);
  for (const auto& e : set) CHECK(g.query(e));
}

TEST_CASE("truncated or degenerate payloads are rejected") {
  const auto f = bf_build(random_ids(50, 8), 0.01, 1);
  std::vector<std::uint8_t> buf;
  ByteWriter w(buf);
  f.serialize(w);
  buf.pop_back();
  ByteReader r(buf);
  CHECK_THROWS_AS(BloomFilter::deserialize(r), Error);
  std::vector<std::uint8_t> zero(13, 0);
  ByteReader z(zero);
  CHECK_THROWS_AS(BloomFilter::deserialize(z), Error);
}

TEST_CASE("empty set and bad targets") {
  const auto f = bf_build({}, 0.01, 0);
  CHECK(f.bit_count() == 8);
  CHECK_FALSE(f.query(ElementId{1}));
  CHECK_THROWS_AS(bf_build(random_ids(3, 1), 0.0, 0), Error);
  CHECK_THROWS_AS(bf_build(random_ids(3, 1), 1.0, 0), Error);
}

TEST_CASE("seeds give independent filters") {
  const auto set = random_ids(500, 10);
  CHECK_FALSE(bf_build(set, 0.01, 1) == bf_build(set, 0.01, 2));
}

}  // TEST_SUITE
