#include "commonsense/wire.hpp"

#include <algorithm>

#include "commonsense/byte_io.hpp"
#include "commonsense/error.hpp"

namespace commonsense::wire {

const char* to_string(MessageType type) noexcept {
  switch (type) {
    case MessageType::sketch: return "SKETCH";
    case MessageType::residue: return "RESIDUE";
    case MessageType::last_inquiry: return "LAST_INQUIRY";
    case MessageType::inquiry_reply: return "INQUIRY_REPLY";
    case MessageType::done: return "DONE";
  }
  return "UNKNOWN";
}

std::vector<std::uint8_t> frame(const Message& message) {
  if (message.payload.size() > kMaxPayloadBytes) throw Error(Errc::protocol_error, "payload too large");
  std::vector<std::uint8_t> out;
  out.reserve(message.framed_size());
  ByteWriter w(out);
  w.bytes(kMagic);
  w.u8(kVersion);
  w.u8(static_cast<std::uint8_t>(message.type));
  w.blob(message.payload);
  return out;
}

void FrameDecoder::feed(std::span<const std::uint8_t> bytes) { buffer_.insert(buffer_.end(), bytes.begin(), bytes.end()); }

std::optional<Message> FrameDecoder::next() {
  if (buffer_.size() < kHeaderBytes) return std::nullopt;
  std::array<std::uint8_t, kHeaderBytes> head{};
  std::copy_n(buffer_.begin(), kHeaderBytes, head.begin());
  if (!std::equal(kMagic.begin(), kMagic.end(), head.begin())) throw Error(Errc::protocol_error, "bad frame magic");
  if (head[4] != kVersion) throw Error(Errc::protocol_error, "unsupported wire version");
  const std::uint8_t type = head[5];
  if (type < 1 || type > 5) throw Error(Errc::protocol_error, "unknown message type");
  ByteReader r(std::span<const std::uint8_t>(head).subspan(6));
  const std::uint32_t len = r.u32();
  if (len > kMaxPayloadBytes) throw Error(Errc::protocol_error, "frame length too large");
  if (buffer_.size() < kHeaderBytes + len) return std::nullopt;
  Message m;
  m.type = static_cast<MessageType>(type);
  m.payload.assign(buffer_.begin() + kHeaderBytes, buffer_.begin() + kHeaderBytes + len);
  buffer_.erase(buffer_.begin(), buffer_.begin() + kHeaderBytes + len);
  return m;
}

Message parse_frame(std::span<const std::uint8_t> bytes) {
  FrameDecoder d;
  d.feed(bytes);
  auto m = d.next();
  if (!m) throw Error(Errc::protocol_error, "incomplete frame");
  if (d.buffered() != 0) throw Error(Errc::protocol_error, "trailing bytes after frame");
  return std::move(*m);
}

}  // namespace commonsense::wire
