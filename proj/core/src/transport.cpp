#include "commonsense/transport.hpp"

#include <arpa/inet.h>
#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <sys/socket.h>
#include <unistd.h>

#include <algorithm>
#include <array>
#include <cerrno>
#include <cstring>

#include "commonsense/error.hpp"

namespace commonsense {

namespace {

[[noreturn]] void throw_errno(const char* what) {
  throw Error(Errc::io_error, std::string(what) + ": " + std::strerror(errno));
}

}  // namespace

std::pair<std::shared_ptr<LoopbackEndpoint>, std::shared_ptr<LoopbackEndpoint>> make_loopback_pair() {
  auto q1 = std::make_shared<LoopbackEndpoint::Queue>();
  auto q2 = std::make_shared<LoopbackEndpoint::Queue>();
  auto a = std::make_shared<LoopbackEndpoint>();
  auto b = std::make_shared<LoopbackEndpoint>();
  a->outbox_ = b->inbox_ = q1;
  a->inbox_ = b->outbox_ = q2;
  return {a, b};
}

void LoopbackEndpoint::send(std::span<const std::uint8_t> bytes) {
  {
    std::lock_guard lock(outbox_->mutex);
    if (outbox_->closed) throw Error(Errc::io_error, "send on closed loopback");
    outbox_->bytes.insert(outbox_->bytes.end(), bytes.begin(), bytes.end());
  }
  outbox_->ready.notify_all();
}

std::size_t LoopbackEndpoint::receive(std::span<std::uint8_t> buffer) {
  std::unique_lock lock(inbox_->mutex);
  inbox_->ready.wait(lock, [&] { return !inbox_->bytes.empty() || inbox_->closed; });
  const std::size_t n = std::min(buffer.size(), inbox_->bytes.size());
  std::copy_n(inbox_->bytes.begin(), n, buffer.begin());
  inbox_->bytes.erase(inbox_->bytes.begin(), inbox_->bytes.begin() + static_cast<std::ptrdiff_t>(n));
  return n;
}

void LoopbackEndpoint::close() {
  for (auto* q : {inbox_.get(), outbox_.get()}) {
    {
      std::lock_guard lock(q->mutex);
      q->closed = true;
    }
    q->ready.notify_all();
  }
}

std::size_t LoopbackEndpoint::available() const {
  std::lock_guard lock(inbox_->mutex);
  return inbox_->bytes.size();
}

void MeteredTransport::send(std::span<const std::uint8_t> bytes) {
  inner_.send(bytes);
  sent_ += bytes.size();
}

std::size_t MeteredTransport::receive(std::span<std::uint8_t> buffer) {
  const std::size_t n = inner_.receive(buffer);
  received_ += n;
  return n;
}

TcpTransport::~TcpTransport() { close(); }

std::unique_ptr<TcpTransport> TcpTransport::connect(const std::string& host, std::uint16_t port) {
  addrinfo hints{};
  hints.ai_family = AF_UNSPEC;
  hints.ai_socktype = SOCK_STREAM;
  addrinfo* res = nullptr;
  const std::string service = std::to_string(port);
  if (int rc = ::getaddrinfo(host.c_str(), service.c_str(), &hints, &res); rc != 0)
    throw Error(Errc::io_error, std::string("getaddrinfo: ") + ::gai_strerror(rc));
  int fd = -1;
  for (addrinfo* p = res; p; p = p->ai_next) {
    fd = ::socket(p->ai_family, p->ai_socktype, p->ai_protocol);
    if (fd < 0) continue;
    if (::connect(fd, p->ai_addr, p->ai_addrlen) == 0) break;
    ::close(fd);
    fd = -1;
  }
  ::freeaddrinfo(res);
  if (fd < 0) throw_errno("connect");
  int one = 1;
  ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
  return std::make_unique<TcpTransport>(fd);
}

void TcpTransport::send(std::span<const std::uint8_t> bytes) {
  std::size_t off = 0;
  while (off < bytes.size()) {
    const ssize_t n = ::send(fd_, bytes.data() + off, bytes.size() - off, MSG_NOSIGNAL);
    if (n < 0) {
      if (errno == EINTR) continue;
      throw_errno("send");
    }
    off += static_cast<std::size_t>(n);
  }
}

std::size_t TcpTransport::receive(std::span<std::uint8_t> buffer) {
  for (;;) {
    const ssize_t n = ::recv(fd_, buffer.data(), buffer.size(), 0);
    if (n >= 0) return static_cast<std::size_t>(n);
    if (errno != EINTR) throw_errno("recv");
  }
}

void TcpTransport::close() {
  if (fd_ >= 0) {
    ::close(fd_);
    fd_ = -1;
  }
}

TcpListener::TcpListener(std::uint16_t port, const std::string& host) {
  fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
  if (fd_ < 0) throw_errno("socket");
  int one = 1;
  ::setsockopt(fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_port = htons(port);
  if (::inet_pton(AF_INET, host.c_str(), &addr.sin_addr) != 1) throw Error(Errc::io_error, "bad listen address");
  if (::bind(fd_, reinterpret_cast<sockaddr*>(&addr), sizeof addr) < 0) throw_errno("bind");
  if (::listen(fd_, 4) < 0) throw_errno("listen");
  socklen_t len = sizeof addr;
  ::getsockname(fd_, reinterpret_cast<sockaddr*>(&addr), &len);
  port_ = ntohs(addr.sin_port);
}

TcpListener::~TcpListener() {
  if (fd_ >= 0) ::close(fd_);
}

std::unique_ptr<TcpTransport> TcpListener::accept() {
  for (;;) {
    const int fd = ::accept(fd_, nullptr, nullptr);
    if (fd >= 0) {
      int one = 1;
      ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
      return std::make_unique<TcpTransport>(fd);
    }
    if (errno != EINTR) throw_errno("accept");
  }
}

void send_message(Transport& transport, const wire::Message& message) { transport.send(wire::frame(message)); }

wire::Message receive_message(Transport& transport, wire::FrameDecoder& decoder) {
  std::array<std::uint8_t, 1 << 16> buf{};
  for (;;) {
    if (auto m = decoder.next()) return std::move(*m);
    const std::size_t n = transport.receive(buf);
    if (n == 0) throw Error(Errc::io_error, "stream closed before a full frame");
    decoder.feed(std::span<const std::uint8_t>(buf.data(), n));
  }
}

}  // namespace commonsense
