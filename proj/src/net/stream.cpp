#include "obdfleet/net/stream.hpp"

#include <algorithm>

namespace obdfleet::net {

std::optional<std::string> LineReader::read_line(std::chrono::milliseconds timeout)
{
    const auto deadline = std::chrono::steady_clock::now() + timeout;
    for (;;) {
        if (const auto nl = buffer_.find('\n'); nl != std::string::npos) {
            std::string line = buffer_.substr(0, nl);
            buffer_.erase(0, nl + 1);
            if (!line.empty() && line.back() == '\r') line.pop_back();
            return line;
        }
        const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(
            deadline - std::chrono::steady_clock::now());
        auto chunk = stream_->read_some(std::max(left, std::chrono::milliseconds{0}));
        if (!chunk) return std::nullopt;
        buffer_ += *chunk;
    }
}

} // namespace obdfleet::net
