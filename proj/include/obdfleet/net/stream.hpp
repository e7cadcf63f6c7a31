#pragma once

#include <chrono>
#include <memory>
#include <optional>
#include <string>
#include <string_view>

namespace obdfleet::net {

/// Bidirectional byte stream. write() throws Error(LinkDown) once the peer
/// is gone; read_some() returns nullopt on timeout and throws LinkDown on
/// close.
class ByteStream {
public:
    virtual ~ByteStream() = default;

    virtual void write(std::string_view bytes) = 0;
    virtual std::optional<std::string> read_some(std::chrono::milliseconds timeout) = 0;
};

/// Line-oriented wrapper: reads are split on '\n' (the '\n' is dropped and a
/// trailing '\r' is stripped).
class LineReader {
public:
    explicit LineReader(ByteStream& stream) : stream_(&stream) {}

    std::optional<std::string> read_line(std::chrono::milliseconds timeout);

private:
    ByteStream* stream_;
    std::string buffer_;
};

/// Opens fresh connections; used by clients that reconnect.
class Connector {
public:
    virtual ~Connector() = default;
    /// Throws Error(LinkDown) when the peer cannot be reached.
    virtual std::unique_ptr<ByteStream> connect() = 0;
};

} // namespace obdfleet::net
