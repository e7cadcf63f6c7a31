#include "obdfleet/codec/iso9141.hpp"

#include "obdfleet/error.hpp"

#include <numeric>
#include <string>

namespace obdfleet::codec {

std::uint8_t checksum(std::span<const std::uint8_t> bytes)
{
    if (bytes.empty()) throw Error(Errc::EmptyInput, "checksum of an empty byte sequence");
    const unsigned sum = std::accumulate(bytes.begin(), bytes.end(), 0u);
    return static_cast<std::uint8_t>(sum & 0xFF);
}

std::vector<std::uint8_t> Iso9141Frame::to_bytes() const
{
    std::vector<std::uint8_t> out;
    out.reserve(kIsoHeaderSize + payload.size() + 1);
    out.push_back(header.priority);
    out.push_back(header.receiver);
    out.push_back(header.transmitter);
    for (const auto b : payload) out.push_back(b);
    out.push_back(checksum);
    return out;
}

Iso9141Frame frame_iso9141(IsoHeader header, std::span<const std::uint8_t> payload)
{
    if (payload.empty()) throw Error(Errc::EmptyInput, "ISO frame payload is empty");
    if (payload.size() > kIsoMaxPayload) {
        throw Error(Errc::PayloadTooLong,
                    "ISO frame payload is " + std::to_string(payload.size()) + " bytes, limit 7");
    }
    Iso9141Frame frame{header, {payload.begin(), payload.end()}, 0};
    auto bytes = frame.to_bytes();
    frame.checksum = checksum(std::span(bytes).first(bytes.size() - 1));
    return frame;
}

Iso9141Frame unframe_iso9141(std::span<const std::uint8_t> raw)
{
    if (raw.size() < kIsoHeaderSize + 2) {
        throw Error(Errc::TooShort, "ISO frame needs header, payload and checksum");
    }
    if (raw.size() > kIsoHeaderSize + kIsoMaxPayload + 1) {
        throw Error(Errc::PayloadTooLong, "ISO frame longer than 11 bytes");
    }
    const auto body = raw.first(raw.size() - 1);
    if (checksum(body) != raw.back()) throw Error(Errc::ChecksumMismatch, "ISO frame checksum");
    Iso9141Frame frame;
    frame.header = {raw[0], raw[1], raw[2]};
    frame.payload.assign(body.begin() + kIsoHeaderSize, body.end());
    frame.checksum = raw.back();
    return frame;
}

} // namespace obdfleet::codec
