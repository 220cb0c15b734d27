#include <doctest.h>

#include <thread>

#include "commonsense/error.hpp"
#include "commonsense/transport.hpp"
#include "commonsense/wire.hpp"

using namespace commonsense;
using namespace commonsense::wire;

TEST_SUITE("wire") {

TEST_CASE("frame layout") {
  const Message m{MessageType::residue, {1, 2, 3}};
  const auto bytes = frame(m);
  REQUIRE(bytes.size() == m.framed_size());
  CHECK(bytes == std::vector<std::uint8_t>{'C', 'S', 'X', '1', 1, 2, 3, 0, 0, 0, 1, 2, 3});
  const Message back = parse_frame(bytes);
  CHECK(back.type == MessageType::residue);
  CHECK(back.payload == m.payload);
}

TEST_CASE("incremental decoding across arbitrary splits") {
  std::vector<std::uint8_t> stream;
  std::vector<Message> sent;
  for (std::uint8_t t = 1; t <= 5; ++t) {
    Message m{static_cast<MessageType>(t), std::vector<std::uint8_t>(t * 37u, t)};
    const auto f = frame(m);
    stream.insert(stream.end(), f.begin(), f.end());
    sent.push_back(m);
  }
  for (std::size_t chunk : {1u, 3u, 10u, 1000u}) {
    FrameDecoder dec;
    std::vector<Message> got;
    for (std::size_t pos = 0; pos < stream.size(); pos += chunk) {
      const std::size_t n = std::min(chunk, stream.size() - pos);
      dec.feed(std::span<const std::uint8_t>(stream).subspan(pos, n));
      while (auto m = dec.next()) got.push_back(*m);
    }
    REQUIRE(got.size() == sent.size());
    for (std::size_t i = 0; i < got.size(); ++i) {
      CHECK(got[i].type == sent[i].type);
      CHECK(got[i].payload == sent[i].payload);
    }
    CHECK(dec.buffered() == 0);
  }
}

TEST_CASE("malformed frames") {
  auto good = frame({MessageType::done, {0}});
  SUBCASE("magic") {
    good[0] = 'X';
    CHECK_THROWS_AS(parse_frame(good), Error);
  }
  SUBCASE("version") {
    good[4] = 9;
    CHECK_THROWS_AS(parse_frame(good), Error);
  }
  SUBCASE("type") {
    good[5] = 0;
    CHECK_THROWS_AS(parse_frame(good), Error);
  }
  SUBCASE("trailing bytes") {
    good.push_back(0);
    CHECK_THROWS_AS(parse_frame(good), Error);
  }
  SUBCASE("truncated") {
    good.pop_back();
    CHECK_THROWS_AS(parse_frame(good), Error);
  }
  SUBCASE("oversized length") {
    good[9] = 0x7f;
    FrameDecoder dec;
    dec.feed(good);
    CHECK_THROWS_AS(dec.next(), Error);
  }
}

TEST_CASE("loopback pair carries frames both ways") {
  auto [a, b] = make_loopback_pair();
  MeteredTransport ma(*a);
  send_message(ma, {MessageType::sketch, {9, 9}});
  FrameDecoder dec;
  const auto m = receive_message(*b, dec);
  CHECK(m.type == MessageType::sketch);
  CHECK(m.payload == std::vector<std::uint8_t>{9, 9});
  CHECK(ma.bytes_sent() == kHeaderBytes + 2);
  b->close();
  FrameDecoder dec2;
  CHECK_THROWS_AS(receive_message(*a, dec2), Error);
}

TEST_CASE("tcp transport round trip") {
  TcpListener listener(0);
  REQUIRE(listener.port() != 0);
  std::vector<std::uint8_t> payload(100000);
  for (std::size_t i = 0; i < payload.size(); ++i) payload[i] = static_cast<std::uint8_t>(i * 13);
  std::thread client([&] {
    auto t = TcpTransport::connect("127.0.0.1", listener.port());
    send_message(*t, {MessageType::residue, payload});
    FrameDecoder dec;
    const auto echo = receive_message(*t, dec);
    CHECK(echo.type == MessageType::done);
  });
  auto server = listener.accept();
  FrameDecoder dec;
  const auto m = receive_message(*server, dec);
  CHECK(m.payload == payload);
  send_message(*server, {MessageType::done, {0}});
  client.join();
}

}  // TEST_SUITE
