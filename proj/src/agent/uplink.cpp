#include "obdfleet/agent/uplink.hpp"

#include "obdfleet/error.hpp"

#include <stdexcept>
#include <string>

namespace obdfleet::agent {

SampleBuffer::SampleBuffer(std::size_t capacity) : capacity_(capacity)
{
    if (capacity == 0) throw std::invalid_argument("buffer capacity must be at least 1");
}

bool SampleBuffer::push(TelemetrySample sample)
{
    std::lock_guard lock(mutex_);
    bool evicted = false;
    if (queue_.size() == capacity_) {
        queue_.pop_front();
        ++dropped_;
        evicted = true;
    }
    queue_.push_back(std::move(sample));
    return evicted;
}

std::optional<TelemetrySample> SampleBuffer::front() const
{
    std::lock_guard lock(mutex_);
    if (queue_.empty()) return std::nullopt;
    return queue_.front();
}

bool SampleBuffer::pop_if(std::uint64_t seq)
{
    std::lock_guard lock(mutex_);
    if (queue_.empty() || queue_.front().seq != seq) return false;
    queue_.pop_front();
    return true;
}

std::size_t SampleBuffer::size() const
{
    std::lock_guard lock(mutex_);
    return queue_.size();
}

std::uint64_t SampleBuffer::dropped() const
{
    std::lock_guard lock(mutex_);
    return dropped_;
}

Uplink::Uplink(net::Connector& connector, std::size_t capacity, std::chrono::milliseconds ack_timeout)
    : connector_(&connector), ack_timeout_(ack_timeout), buffer_(capacity)
{
}

TransmitResult Uplink::transmit(TelemetrySample sample)
{
    const auto seq = sample.seq;
    enqueue(std::move(sample));
    flush();
    // The FIFO is seq-ordered, so the sample is still waiting iff the head is not past it.
    const auto head = buffer_.front();
    return head && head->seq <= seq ? TransmitResult::Buffered : TransmitResult::Acked;
}

bool Uplink::ensure_connected()
{
    if (stream_) return true;
    try {
        stream_ = connector_->connect();
        reader_ = std::make_unique<net::LineReader>(*stream_);
        return true;
    } catch (const Error&) {
        disconnect();
        return false;
    }
}

void Uplink::disconnect()
{
    reader_.reset();
    stream_.reset();
}

std::size_t Uplink::flush()
{
    std::size_t sent = 0;
    while (auto next = buffer_.front()) {
        if (!ensure_connected()) break;
        try {
            stream_->write(to_wire(*next) + '\n');
            auto reply = reader_->read_line(ack_timeout_);
            if (!reply) {
                disconnect();
                break;
            }
            if (*reply == "ACK " + std::to_string(next->seq)) {
                buffer_.pop_if(next->seq);
                ++acked_;
                ++sent;
            } else if (reply->starts_with("NAK")) {
                // The server will never accept this record; resending is pointless.
                buffer_.pop_if(next->seq);
                ++rejected_;
            } else {
                disconnect();
                break;
            }
        } catch (const Error&) {
            disconnect();
            break;
        }
    }
    return sent;
}

std::optional<std::uint64_t> query_last_seq(net::Connector& connector, const std::string& vehicle_id,
                                            std::chrono::milliseconds timeout)
{
    auto stream = connector.connect();
    net::LineReader reader(*stream);
    stream->write("LAST " + vehicle_id + "\n");
    const auto reply = reader.read_line(timeout);
    if (!reply) throw Error(Errc::TimedOut, "no reply to LAST");
    if (reply->starts_with("ERR UnknownVehicle")) return std::nullopt;
    if (!reply->starts_with("LAST ")) throw Error(Errc::UnexpectedReply, "LAST replied '" + *reply + "'");
    try {
        return std::stoull(reply->substr(5));
    } catch (const std::exception&) {
        throw Error(Errc::UnexpectedReply, "LAST replied '" + *reply + "'");
    }
}

} // namespace obdfleet::agent
