#include <benchmark/benchmark.h>

#include <random>

#include "commonsense/baselines.hpp"
#include "commonsense/codec/bch.hpp"
#include "commonsense/codec/rans.hpp"
#include "commonsense/codec/skellam.hpp"
#include "commonsense/codec/sketch_codec.hpp"
#include "commonsense/decoder.hpp"
#include "commonsense/experiment.hpp"
#include "commonsense/protocol.hpp"
#include "commonsense/sketch.hpp"
#include "commonsense/smf.hpp"

using namespace commonsense;

namespace {

MatrixSpec uni_spec(std::int64_t d, std::int64_t n) {
  return {default_rows(kDefaultUnidirectionalAlpha, d, n, kUnidirectionalWeight), kUnidirectionalWeight, 42, 64};
}

void BM_EncodeSet(benchmark::State& state) {
  const auto n = state.range(0);
  const Instance inst = gen_instance({n, 0, 0, 64, 1});
  const MatrixSpec spec = uni_spec(n / 100 + 1, n);
  for (auto _ : state) benchmark::DoNotOptimize(encode_set(spec, inst.a));
  state.SetItemsProcessed(state.iterations() * n);
}
BENCHMARK(BM_EncodeSet)->Arg(10000)->Arg(100000);

void BM_StreamUpdate(benchmark::State& state) {
  const MatrixSpec spec{10000, 7, 3, 64};
  Sketch s = empty_sketch(spec);
  std::uint64_t x = 0;
  for (auto _ : state) update(s, ElementId{++x}, +1);
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_StreamUpdate);

void BM_MpDecode(benchmark::State& state) {
  const auto d = state.range(0);
  const std::int64_t n = 100 * d;
  const Instance inst = gen_instance({n - d, 0, d, 64, 2});
  const MatrixSpec spec = uni_spec(d, n);
  const Residue r = residue_between(encode_set(spec, inst.b), encode_set(spec, inst.a));
  HashedColumns cols(spec);
  for (auto _ : state) {
    DecoderState st(cols, inst.b, r.values);
    benchmark::DoNotOptimize(mp_decode(st, 16 * std::size_t{spec.rows} + 1024));
  }
  state.SetItemsProcessed(state.iterations() * n);
}
BENCHMARK(BM_MpDecode)->Arg(10)->Arg(100)->Unit(benchmark::kMillisecond);

void BM_RansEncode(benchmark::State& state) {
  std::mt19937_64 rng(3);
  std::poisson_distribution<std::int64_t> p1(2.0), p2(1.0);
  std::vector<std::int64_t> symbols(100000);
  for (auto& s : symbols) s = p1(rng) - p2(rng);
  const auto model = codec::skellam_model({2.0, 1.0});
  for (auto _ : state) benchmark::DoNotOptimize(codec::rans_encode(symbols, model));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(symbols.size()));
}
BENCHMARK(BM_RansEncode);

void BM_RansDecode(benchmark::State& state) {
  std::mt19937_64 rng(3);
  std::poisson_distribution<std::int64_t> p1(2.0), p2(1.0);
  std::vector<std::int64_t> symbols(100000);
  for (auto& s : symbols) s = p1(rng) - p2(rng);
  const auto model = codec::skellam_model({2.0, 1.0});
  const auto bytes = codec::rans_encode(symbols, model);
  for (auto _ : state) benchmark::DoNotOptimize(codec::rans_decode(bytes, symbols.size(), model));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(symbols.size()));
}
BENCHMARK(BM_RansDecode);

void BM_BchCorrect(benchmark::State& state) {
  const auto t = static_cast<unsigned>(state.range(0));
  std::mt19937_64 rng(4);
  std::vector<std::uint8_t> bits(20000);
  for (auto& b : bits) b = rng() & 1;
  const auto syndrome = codec::bch_encode_parities(bits, t);
  auto local = bits;
  for (unsigned k = 0; k < t; ++k) local[k * 97] ^= 1;
  for (auto _ : state) benchmark::DoNotOptimize(codec::bch_correct(local, syndrome, t));
}
BENCHMARK(BM_BchCorrect)->Arg(4)->Arg(16);

void BM_BloomQuery(benchmark::State& state) {
  const Instance inst = gen_instance({0, 100000, 0, 64, 5});
  const auto f = bf_build(inst.a, 0.01, 1);
  std::size_t i = 0;
  for (auto _ : state) benchmark::DoNotOptimize(f.query(inst.a[i++ % inst.a.size()]));
}
BENCHMARK(BM_BloomQuery);

void BM_IbltPeel(benchmark::State& state) {
  const auto d = state.range(0);
  const Instance inst = gen_instance({10 * d, d / 2, d / 2, 64, 6});
  const auto p = IbltParams::for_difference(d, 64, 1.5);
  const auto diff = iblt_subtract(iblt_encode(inst.a, p), iblt_encode(inst.b, p));
  for (auto _ : state) benchmark::DoNotOptimize(iblt_peel(diff));
}
BENCHMARK(BM_IbltPeel)->Arg(1000);

void BM_UnidirectionalSession(benchmark::State& state) {
  const Instance inst = gen_instance({20000, 0, 200, 64, 7});
  SessionConfig c;
  c.seed = 8;
  for (auto _ : state) benchmark::DoNotOptimize(run_unidirectional(inst.a, inst.b, c));
}
BENCHMARK(BM_UnidirectionalSession)->Unit(benchmark::kMillisecond);

void BM_BidirectionalSession(benchmark::State& state) {
  const Instance inst = gen_instance({20000, 100, 100, 64, 9});
  SessionConfig c;
  c.seed = 10;
  for (auto _ : state) benchmark::DoNotOptimize(run_bidirectional(inst.a, inst.b, c));
}
BENCHMARK(BM_BidirectionalSession)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
