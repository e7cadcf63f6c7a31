#pragma once

#include "obdfleet/net/stream.hpp"

#include <chrono>
#include <string>
#include <string_view>
#include <vector>

namespace obdfleet::agent {

/// Command/response client for an ELM327 on a byte stream. Each command is
/// sent with a trailing CR and its reply read up to the '>' prompt.
class Elm327Client {
public:
    Elm327Client(net::ByteStream& stream, std::chrono::milliseconds timeout) : stream_(&stream), timeout_(timeout) {}

    /// Returns the reply body with the echoed command, blank lines and the
    /// prompt removed (multiple lines joined by '\n'). Throws Error(TimedOut)
    /// when no prompt arrives in time.
    std::string command(std::string_view cmd);

    void set_timeout(std::chrono::milliseconds timeout) noexcept { timeout_ = timeout; }

    /// Raw replies, prompt included, in order.
    const std::vector<std::string>& transcript() const noexcept { return transcript_; }
    const std::vector<std::string>& sent() const noexcept { return sent_; }

private:
    net::ByteStream* stream_;
    std::chrono::milliseconds timeout_;
    std::string carry_;
    std::vector<std::string> transcript_;
    std::vector<std::string> sent_;
};

/// The minimal bring-up: ATZ, ATSP0, 0100. Returns the 0100 reply body.
/// Throws Error(TimedOut) or Error(UnexpectedReply).
std::string run_init_handshake(Elm327Client& client);

} // namespace obdfleet::agent
