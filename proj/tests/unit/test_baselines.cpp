#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "commonsense/baselines.hpp"
#include "commonsense/error.hpp"
#include "commonsense/experiment.hpp"
#include "oracles.hpp"

using namespace commonsense;

namespace {

bool within(double value, double target, double rel) { return std::abs(value - target) <= rel * target; }

std::vector<ElementId> native_difference(std::vector<ElementId> a, std::vector<ElementId> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  std::vector<ElementId> out;
  std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

}  // namespace

TEST_SUITE("baselines") {

TEST_CASE("log binomial") {
  CHECK(log2_binomial(10, 0) == doctest::Approx(0.0));
  CHECK(log2_binomial(10, 3) == doctest::Approx(std::log2(120.0)));
  CHECK(log2_binomial(52, 5) == doctest::Approx(std::log2(2598960.0)));
}

TEST_CASE("printed lower bounds") {
  CHECK(within(bits_to_kb(setr_lower_bound(10000, 64)), 65.2, 0.005));
  CHECK(within(bits_to_kb(setx_lower_bound(1000000, 1010000, 0, 10000)), 10.1, 0.005));
  CHECK(within(bits_to_kb(setr_lower_bound(10000, 256)), 305.2, 0.005));
  CHECK(within(bits_to_kb(setr_lower_bound_two_sided(10000, 10000, 256)), 610.4, 0.005));
  CHECK(within(bits_to_kb(setx_lower_bound(1010000, 1010000, 10000, 10000)), 20.3, 0.005));
}

TEST_CASE("bound identities") {
  CHECK(setx_lower_bound(50, 50, 0, 0) == 0.0);
  CHECK(setx_lower_bound(100, 110, 0, 10) < setx_lower_bound(100, 120, 0, 20));
  const double d = 20000;
  CHECK(setr_lower_bound_two_sided(10000, 10000, 256) ==
        doctest::Approx(d * std::log2(2 * std::exp(1.0) * std::pow(2.0, 256) / d)));
  CHECK(setr_lower_bound_two_sided(0, 40, 64) == doctest::Approx(setr_lower_bound(40, 64)));
  CHECK_THROWS_AS(setx_lower_bound(10, 10, 1, 2), Error);
  CHECK_THROWS_AS(setr_lower_bound(0, 64), Error);
}

TEST_CASE("iblt cell layout") {
  const auto p = IbltParams::for_difference(100, 256);
  CHECK(p.cell_count == 136);
  CHECK(p.cell_bytes() == 4 + 32 + 4);
  const auto q = IbltParams::for_difference(1, 64, 1.36, 4, 48);
  CHECK(q.cell_count == 4);
  CHECK(q.cell_bytes() == 4 + 8 + 6);
}

TEST_CASE("iblt peeling agrees with the hypergraph 2-core oracle") {
  std::mt19937_64 rng(5);
  int ok = 0, agree = 0;
  const int trials = 1000;
  for (int t = 0; t < trials; ++t) {
    const Instance inst = gen_instance({200, 40, 60, 64, rng()});
    const auto p = IbltParams::for_difference(100, 64, 1.36, 4, 32, rng());
    const IbltTable ta = iblt_encode(inst.a, p);
    std::vector<std::vector<std::uint32_t>> edges;
    for (const auto& e : native_difference(inst.a, inst.b)) edges.push_back(ta.cells_of(e));
    for (const auto& e : native_difference(inst.b, inst.a)) edges.push_back(ta.cells_of(e));
    const auto res = iblt_peel(iblt_subtract(ta, iblt_encode(inst.b, p)));
    agree += res.ok == oracle::hypergraph_peels(edges, p.cell_count);
    if (!res.ok) continue;
    ++ok;
    CHECK(res.positive.size() == 40);
    CHECK(res.negative.size() == 60);
  }
  CHECK(agree == trials);
  CHECK(ok > 0);
}

TEST_CASE("iblt peeling at 1.36 d for a thousand differences") {
  std::mt19937_64 rng(6);
  int ok = 0;
  for (int t = 0; t < 100; ++t) {
    const Instance inst = gen_instance({500, 500, 500, 64, rng()});
    const auto p = IbltParams::for_difference(1000, 64, 1.36, 4, 32, rng());
    ok += iblt_peel(iblt_subtract(iblt_encode(inst.a, p), iblt_encode(inst.b, p))).ok;
  }
  CHECK(ok >= 99);
}

TEST_CASE("iblt insert then erase is empty") {
  const auto p = IbltParams::for_difference(10, 128);
  IbltTable t(p);
  const Instance inst = gen_instance({0, 30, 0, 128, 2});
  for (const auto& e : inst.a) t.insert(e);
  CHECK_FALSE(t.empty());
  for (const auto& e : inst.a) t.erase(e);
  CHECK(t.empty());
}

TEST_CASE("iblt parameter mismatch") {
  auto p = IbltParams::for_difference(10, 64);
  auto q = p;
  q.seed = 1;
  CHECK_THROWS_AS(iblt_subtract(IbltTable(p), IbltTable(q)), Error);
}

TEST_CASE("iblt two-message exchange") {
  const Instance inst = gen_instance({5000, 30, 50, 64, 9});
  const auto p = IbltParams::for_difference(80, 64, 1.5);
  const auto res = iblt_bidirectional(inst.a, inst.b, p);
  REQUIRE(res.ok);
  const auto truth = native_intersection(inst.a, inst.b);
  CHECK(res.sender_intersection == truth);
  CHECK(res.receiver_intersection == truth);
  CHECK(res.first_message_bytes == p.cell_count * p.cell_bytes());
  CHECK(res.second_message_bytes > 0);
}

}  // TEST_SUITE
