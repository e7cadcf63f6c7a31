#pragma once

// Store-and-forward uplink from the agent to the fleet server.
//
// Samples go into a bounded FIFO; flush() drains it in seq order over the
// current connection, dropping a sample only once the server has answered
// "ACK <seq>" for it. A failed write or a missing ack marks the link down;
// the next flush() reconnects. When the FIFO is full the oldest sample is
// evicted and counted.

#include "obdfleet/net/stream.hpp"
#include "obdfleet/telemetry.hpp"

#include <chrono>
#include <cstdint>
#include <deque>
#include <memory>
#include <mutex>
#include <optional>

namespace obdfleet::agent {

/// Bounded FIFO shared by one producer (poll loop) and one consumer
/// (uplink).
class SampleBuffer {
public:
    explicit SampleBuffer(std::size_t capacity);

    /// Never blocks. Returns true if the oldest sample had to be evicted.
    bool push(TelemetrySample sample);
    std::optional<TelemetrySample> front() const;
    /// Removes the front sample if it still carries `seq`.
    bool pop_if(std::uint64_t seq);

    std::size_t size() const;
    std::size_t capacity() const noexcept { return capacity_; }
    std::uint64_t dropped() const;

private:
    mutable std::mutex mutex_;
    std::deque<TelemetrySample> queue_;
    std::size_t capacity_;
    std::uint64_t dropped_ = 0;
};

enum class TransmitResult { Acked, Buffered };

class Uplink {
public:
    Uplink(net::Connector& connector, std::size_t capacity, std::chrono::milliseconds ack_timeout);

    /// enqueue() followed by flush(); Acked when the sample made it out.
    TransmitResult transmit(TelemetrySample sample);

    /// Producer side.
    void enqueue(TelemetrySample sample) { buffer_.push(std::move(sample)); }

    /// Consumer side. Sends until the buffer is empty or the link fails;
    /// returns the number of samples acknowledged.
    std::size_t flush();

    bool connected() const noexcept { return stream_ != nullptr; }
    std::size_t buffered() const { return buffer_.size(); }
    std::uint64_t dropped() const { return buffer_.dropped(); }
    std::uint64_t rejected() const noexcept { return rejected_; }
    std::uint64_t acked() const noexcept { return acked_; }

private:
    bool ensure_connected();
    void disconnect();

    net::Connector* connector_;
    std::chrono::milliseconds ack_timeout_;
    SampleBuffer buffer_;
    std::unique_ptr<net::ByteStream> stream_;
    std::unique_ptr<net::LineReader> reader_;
    std::uint64_t rejected_ = 0;
    std::uint64_t acked_ = 0;
};

/// Asks the server for the highest seq it holds for `vehicle_id` so a
/// restarted agent can continue the sequence. nullopt if the vehicle is
/// unknown. Throws Error(LinkDown) or Error(TimedOut).
std::optional<std::uint64_t> query_last_seq(net::Connector& connector, const std::string& vehicle_id,
                                            std::chrono::milliseconds timeout);

} // namespace obdfleet::agent
