#pragma once

#include "obdfleet/net/stream.hpp"

#include <atomic>
#include <cstdint>
#include <string>

namespace obdfleet::net {

struct Endpoint {
    std::string host = "127.0.0.1";
    std::uint16_t port = 0;

    /// "host:port" or ":port"; throws std::invalid_argument.
    static Endpoint parse(std::string_view text);
    std::string to_string() const;
};

class FileDescriptor {
public:
    FileDescriptor() = default;
    explicit FileDescriptor(int fd) : fd_(fd) {}
    FileDescriptor(FileDescriptor&& other) noexcept : fd_(other.release()) {}
    FileDescriptor& operator=(FileDescriptor&& other) noexcept;
    FileDescriptor(const FileDescriptor&) = delete;
    FileDescriptor& operator=(const FileDescriptor&) = delete;
    ~FileDescriptor() { reset(); }

    int get() const noexcept { return fd_; }
    int release() noexcept;
    void reset() noexcept;
    explicit operator bool() const noexcept { return fd_ >= 0; }

private:
    int fd_ = -1;
};

class TcpStream final : public ByteStream {
public:
    explicit TcpStream(FileDescriptor fd) : fd_(std::move(fd)) {}

    /// Throws Error(LinkDown) when the connection cannot be established.
    static std::unique_ptr<TcpStream> connect(const Endpoint& ep, std::chrono::milliseconds timeout);

    void write(std::string_view bytes) override;
    std::optional<std::string> read_some(std::chrono::milliseconds timeout) override;

    /// Unblocks a concurrent reader.
    void shutdown() noexcept;

private:
    FileDescriptor fd_;
};

class TcpListener {
public:
    /// Port 0 picks an ephemeral port; see port().
    explicit TcpListener(const Endpoint& ep);

    std::uint16_t port() const noexcept { return port_; }
    /// nullptr on timeout.
    std::unique_ptr<TcpStream> accept(std::chrono::milliseconds timeout);

private:
    FileDescriptor fd_;
    std::uint16_t port_ = 0;
};

class TcpConnector final : public Connector {
public:
    TcpConnector(Endpoint ep, std::chrono::milliseconds timeout) : ep_(std::move(ep)), timeout_(timeout) {}
    std::unique_ptr<ByteStream> connect() override;

private:
    Endpoint ep_;
    std::chrono::milliseconds timeout_;
};

} // namespace obdfleet::net
