#include <doctest.h>

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <random>
#include <sstream>
#include <thread>

#include "commonsense/error.hpp"
#include "commonsense/experiment.hpp"
#include "commonsense/protocol.hpp"
#include "commonsense/sketch.hpp"

using namespace commonsense;

namespace {

std::vector<ElementId> sorted(std::vector<ElementId> v) {
  std::sort(v.begin(), v.end());
  return v;
}

std::vector<ElementId> set_difference(std::vector<ElementId> a, std::vector<ElementId> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  std::vector<ElementId> out;
  std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

bool disjoint(std::vector<ElementId> a, std::vector<ElementId> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  std::vector<ElementId> both;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(both));
  return both.empty();
}

std::uint64_t fnv1a(std::uint64_t h, std::span<const std::uint8_t> bytes) {
  for (auto b : bytes) {
    h ^= b;
    h *= 0x100000001b3ULL;
  }
  return h;
}

struct ManualPeers {
  std::vector<ElementId> a, b;
  MatrixSpec spec;
  codec::SketchPrior prior;
  SessionConfig config;
};

ManualPeers manual_setup(std::uint64_t seed) {
  ManualPeers p;
  const Instance inst = gen_instance({300, 6, 10, 64, seed});
  p.a = inst.a;
  p.b = inst.b;
  p.config.seed = seed;
  const std::int64_t d = 16;
  p.spec = resolve_spec(p.config, d, 310, true);
  p.prior = {306, 310, d};
  return p;
}

}  // namespace

TEST_SUITE("protocol") {

TEST_CASE("default rows") {
  CHECK(default_rows(1.0, 0, 100, 7) == 14);
  const double expect = std::ceil(2.0 * 10 * std::log2(std::exp(1.0) * 1000 / 10));
  CHECK(default_rows(2.0, 10, 1000, 7) == static_cast<std::uint32_t>(expect));
  SessionConfig c;
  c.rows = 77;
  CHECK(resolve_spec(c, 5, 100, false).rows == 77);
  CHECK(resolve_spec(c, 5, 100, false).ones_per_column == kUnidirectionalWeight);
  CHECK(resolve_spec(c, 5, 100, true).ones_per_column == kBidirectionalWeight);
  c.signature_bits = 12;
  CHECK_THROWS_AS(c.validate(), Error);
}

TEST_CASE("initiator choice") {
  CHECK(choose_initiator(3, 5) == Side::first);
  CHECK(choose_initiator(5, 3) == Side::second);
  CHECK(choose_initiator(4, 4, "alice", "bob") == Side::first);
  CHECK(choose_initiator(4, 4, "zed", "bob") == Side::second);
}

TEST_CASE("identical sets need no decoding") {
  const Instance inst = gen_instance({1000, 0, 0, 64, 3});
  SessionConfig c;
  c.seed = 5;
  const auto res = run_unidirectional(inst.a, inst.b, c);
  CHECK(is_success(res.transcript.outcome));
  CHECK(res.intersection == sorted(inst.b));
  REQUIRE_FALSE(res.transcript.decoder_stats.empty());
  CHECK(res.transcript.decoder_stats.front().iterations == 0);
  CHECK(res.transcript.rounds == 1);
}

TEST_CASE("unidirectional recovers the intersection") {
  std::mt19937_64 rng(11);
  for (int t = 0; t < 40; ++t) {
    const std::int64_t d = 1 + static_cast<std::int64_t>(rng() % 8);
    const Instance inst = gen_instance({512 - d, 0, d, 64, rng()});
    SessionConfig c;
    c.seed = rng();
    const auto res = run_unidirectional(inst.a, inst.b, c);
    REQUIRE(is_success(res.transcript.outcome));
    CHECK(res.intersection == native_intersection(inst.a, inst.b));
    CHECK(res.transcript.total_bytes == res.transcript.transport_bytes);
  }
  const Instance bad = gen_instance({10, 2, 2, 64, 1});
  CHECK_THROWS_AS(run_unidirectional(bad.a, bad.b, {}), Error);
}

TEST_CASE("bidirectional: exact at both peers, estimates never overlap") {
  std::mt19937_64 rng(23);
  for (int t = 0; t < 30; ++t) {
    const Instance inst = gen_instance({2048, 16, 16, 64, rng()});
    SessionConfig c;
    c.seed = rng();
    bool overlap = false;
    const auto res = run_bidirectional(inst.a, inst.b, c, [&](const ProbeEvent& ev) {
      overlap = overlap || !disjoint(ev.initiator_estimate, ev.responder_estimate);
    });
    CHECK_FALSE(overlap);
    REQUIRE(is_success(res.transcript.outcome));
    const auto truth = native_intersection(inst.a, inst.b);
    CHECK(res.alice_intersection == truth);
    CHECK(res.bob_intersection == truth);
    CHECK(res.transcript.rounds <= c.max_rounds);
    CHECK(res.transcript.total_bytes == res.transcript.transport_bytes);
  }
}

TEST_CASE("bidirectional on a subset pair costs at most twice the one-way session") {
  std::mt19937_64 rng(31);
  std::uint64_t bi = 0, uni = 0;
  for (int t = 0; t < 10; ++t) {
    const Instance inst = gen_instance({5000, 0, 40, 64, rng()});
    SessionConfig c;
    c.seed = rng();
    const auto b = run_bidirectional(inst.a, inst.b, c);
    const auto u = run_unidirectional(inst.a, inst.b, c);
    REQUIRE(is_success(b.transcript.outcome));
    REQUIRE(is_success(u.transcript.outcome));
    CHECK(b.alice_initiated);
    bi += b.transcript.total_bytes;
    uni += u.transcript.total_bytes;
  }
  CHECK(bi <= 2 * uni);
}

TEST_CASE("stream digest decoding") {
  std::mt19937_64 rng(41);
  SUBCASE("identical digests") {
    const Instance inst = gen_instance({2000, 0, 0, 64, 1});
    const MatrixSpec spec{400, 7, 9, 64};
    const auto s = encode_set(spec, inst.b);
    const auto got = decode_stream_digest(s, s, inst.b);
    REQUIRE(got);
    CHECK(got->empty());
  }
  SUBCASE("planted losses") {
    for (int t = 0; t < 20; ++t) {
      const Instance inst = gen_instance({10000 - 50, 0, 50, 64, rng()});
      const MatrixSpec spec{default_rows(kDefaultUnidirectionalAlpha, 50, 10000, 7), 7, rng(), 64};
      const auto got = decode_stream_digest(encode_set(spec, inst.a), encode_set(spec, inst.b), inst.b);
      REQUIRE(got);
      CHECK(*got == set_difference(inst.b, inst.a));
    }
  }
  SUBCASE("candidates from a larger superset") {
    const Instance inst = gen_instance({9000, 0, 50, 64, rng()});
    const Instance noise = gen_instance({90000, 0, 0, 64, rng()});
    std::vector<ElementId> superset = inst.b;
    superset.insert(superset.end(), noise.a.begin(), noise.a.end());
    const MatrixSpec spec{default_rows(kDefaultUnidirectionalAlpha, 50, 100000, 7), 7, rng(), 64};
    const auto got = decode_stream_digest(encode_set(spec, inst.a), encode_set(spec, inst.b), superset);
    REQUIRE(got);
    CHECK(*got == set_difference(inst.b, inst.a));
  }
}

TEST_CASE("duplicate inquiry signatures are reported") {
  auto p = manual_setup(7);
  Peer init("alice", p.a, p.spec, p.config, Peer::Role::initiator, p.prior, true);
  Peer resp("bob", p.b, p.spec, p.config, Peer::Role::responder, p.prior, true);
  const auto first = init.start();
  REQUIRE(first.size() == 1);
  resp.on_message(first[0]);
  wire::Message inquiry{wire::MessageType::last_inquiry, {}};
  ByteWriter w(inquiry.payload);
  w.u32(2);
  for (int k = 0; k < 2; ++k)
    for (int b = 0; b < 8; ++b) w.u8(0x5a);
  try {
    resp.on_message(inquiry);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::signature_collision);
  }
}

TEST_CASE("out-of-order messages are rejected") {
  auto p = manual_setup(8);
  Peer resp("bob", p.b, p.spec, p.config, Peer::Role::responder, p.prior, true);
  const wire::Message residue{wire::MessageType::residue, {}};
  CHECK_THROWS_AS(resp.on_message(residue), Error);
}

TEST_CASE("peers over tcp reach the same result as the loopback driver") {
  auto p = manual_setup(9);
  Peer a1("alice", p.a, p.spec, p.config, Peer::Role::initiator, p.prior, true);
  Peer b1("bob", p.b, p.spec, p.config, Peer::Role::responder, p.prior, true);
  const auto t = drive_session(a1, b1);
  REQUIRE(is_success(t.outcome));

  Peer a2("alice", p.a, p.spec, p.config, Peer::Role::initiator, p.prior, true);
  Peer b2("bob", p.b, p.spec, p.config, Peer::Role::responder, p.prior, true);
  TcpListener listener(0);
  std::thread client([&] {
    auto conn = TcpTransport::connect("127.0.0.1", listener.port());
    run_peer(a2, *conn);
  });
  auto server = listener.accept();
  run_peer(b2, *server);
  client.join();
  CHECK(a2.intersection() == a1.intersection());
  CHECK(b2.intersection() == b1.intersection());
  CHECK(b2.intersection() == native_intersection(p.a, p.b));
}

TEST_CASE("golden transcript") {
  auto p = manual_setup(12);
  Peer peers[2] = {Peer("alice", p.a, p.spec, p.config, Peer::Role::initiator, p.prior, true),
                   Peer("bob", p.b, p.spec, p.config, Peer::Role::responder, p.prior, true)};
  std::uint64_t h = 0xcbf29ce484222325ULL;
  std::size_t count = 0;
  std::vector<std::pair<unsigned, wire::Message>> queue;
  for (auto& m : peers[0].start()) queue.emplace_back(1, m);
  while (!queue.empty()) {
    auto [to, m] = queue.front();
    queue.erase(queue.begin());
    h = fnv1a(h, wire::frame(m));
    ++count;
    for (auto& reply : peers[to].on_message(m)) queue.emplace_back(1 - to, reply);
  }
  REQUIRE(peers[0].finished());
  REQUIRE(peers[1].finished());
  std::ostringstream line;
  line << count << ' ' << std::hex << h;

  const std::string path = std::string(COMMONSENSE_TEST_DATA) + "/golden_transcript.txt";
  if (std::getenv("COMMONSENSE_REGENERATE_GOLDEN")) {
    std::ofstream(path) << line.str() << '\n';
  }
  std::ifstream in(path);
  REQUIRE_MESSAGE(in.good(), "missing " << path << "; set COMMONSENSE_REGENERATE_GOLDEN=1");
  std::string expected;
  std::getline(in, expected);
  CHECK(line.str() == expected);
}

}  // TEST_SUITE
