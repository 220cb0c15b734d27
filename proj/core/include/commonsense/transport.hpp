#pragma once

#include <condition_variable>
#include <cstdint>
#include <deque>
#include <memory>
#include <mutex>
#include <span>
#include <string>

#include "commonsense/wire.hpp"

namespace commonsense {

/// An ordered, reliable byte stream.
class Transport {
 public:
  virtual ~Transport() = default;
  virtual void send(std::span<const std::uint8_t> bytes) = 0;
  /// Blocks until at least one byte is available. Returns 0 at end of stream.
  virtual std::size_t receive(std::span<std::uint8_t> buffer) = 0;
  virtual void close() {}
};

/// One end of an in-memory duplex pipe.
class LoopbackEndpoint final : public Transport {
 public:
  void send(std::span<const std::uint8_t> bytes) override;
  std::size_t receive(std::span<std::uint8_t> buffer) override;
  void close() override;
  std::size_t available() const;

 private:
  friend std::pair<std::shared_ptr<LoopbackEndpoint>, std::shared_ptr<LoopbackEndpoint>> make_loopback_pair();

  struct Queue {
    mutable std::mutex mutex;
    std::condition_variable ready;
    std::deque<std::uint8_t> bytes;
    bool closed = false;
  };
  std::shared_ptr<Queue> inbox_;
  std::shared_ptr<Queue> outbox_;
};

std::pair<std::shared_ptr<LoopbackEndpoint>, std::shared_ptr<LoopbackEndpoint>> make_loopback_pair();

/// Counts bytes passing through another transport.
class MeteredTransport final : public Transport {
 public:
  explicit MeteredTransport(Transport& inner) : inner_(inner) {}
  void send(std::span<const std::uint8_t> bytes) override;
  std::size_t receive(std::span<std::uint8_t> buffer) override;
  void close() override { inner_.close(); }

  std::uint64_t bytes_sent() const noexcept { return sent_; }
  std::uint64_t bytes_received() const noexcept { return received_; }

 private:
  Transport& inner_;
  std::uint64_t sent_ = 0;
  std::uint64_t received_ = 0;
};

/// Blocking TCP stream over a connected POSIX socket.
class TcpTransport final : public Transport {
 public:
  explicit TcpTransport(int fd) : fd_(fd) {}
  ~TcpTransport() override;
  TcpTransport(const TcpTransport&) = delete;
  TcpTransport& operator=(const TcpTransport&) = delete;

  static std::unique_ptr<TcpTransport> connect(const std::string& host, std::uint16_t port);

  void send(std::span<const std::uint8_t> bytes) override;
  std::size_t receive(std::span<std::uint8_t> buffer) override;
  void close() override;

 private:
  int fd_;
};

/// Listening TCP socket; port 0 picks an ephemeral port.
class TcpListener {
 public:
  explicit TcpListener(std::uint16_t port, const std::string& host = "127.0.0.1");
  ~TcpListener();
  TcpListener(const TcpListener&) = delete;
  TcpListener& operator=(const TcpListener&) = delete;

  std::uint16_t port() const noexcept { return port_; }
  std::unique_ptr<TcpTransport> accept();

 private:
  int fd_ = -1;
  std::uint16_t port_ = 0;
};

void send_message(Transport& transport, const wire::Message& message);
/// Reads until one full frame is decoded. Throws Error(io_error) on end of stream.
wire::Message receive_message(Transport& transport, wire::FrameDecoder& decoder);

}  // namespace commonsense
