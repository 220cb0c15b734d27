#pragma once

#include <array>
#include <cstdint>
#include <deque>
#include <optional>
#include <span>
#include <vector>

namespace commonsense::wire {

enum class MessageType : std::uint8_t {
  sketch = 1,
  residue = 2,
  last_inquiry = 3,
  inquiry_reply = 4,
  done = 5,
};
const char* to_string(MessageType type) noexcept;

inline constexpr std::array<std::uint8_t, 4> kMagic = {'C', 'S', 'X', '1'};
inline constexpr std::uint8_t kVersion = 1;
inline constexpr std::size_t kHeaderBytes = 10;
inline constexpr std::uint32_t kMaxPayloadBytes = 1U << 30;

struct Message {
  MessageType type = MessageType::done;
  std::vector<std::uint8_t> payload;

  std::size_t framed_size() const noexcept { return kHeaderBytes + payload.size(); }
};

/// magic, version u8, type u8, payload length u32 LE, payload.
std::vector<std::uint8_t> frame(const Message& message);

/// Incremental frame parser. Throws Error(protocol_error) on bad magic,
/// version, type or an oversized length.
class FrameDecoder {
 public:
  void feed(std::span<const std::uint8_t> bytes);
  std::optional<Message> next();
  std::size_t buffered() const noexcept { return buffer_.size(); }

 private:
  std::deque<std::uint8_t> buffer_;
};

/// Parses exactly one frame; trailing bytes are a protocol error.
Message parse_frame(std::span<const std::uint8_t> bytes);

}  // namespace commonsense::wire
