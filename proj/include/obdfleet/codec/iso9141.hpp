#pragma once

// ISO 9141-2 / ISO 14230-4 K-line message envelope:
//   priority | receiver | transmitter | payload (1..7) | checksum

#include <cstdint>
#include <span>
#include <vector>

namespace obdfleet::codec {

inline constexpr std::size_t kIsoHeaderSize = 3;
inline constexpr std::size_t kIsoMaxPayload = 7;

struct IsoHeader {
    std::uint8_t priority = 0;
    std::uint8_t receiver = 0;
    std::uint8_t transmitter = 0;

    friend bool operator==(const IsoHeader&, const IsoHeader&) = default;
};

/// Functional request addressing used by J1979 scan tools.
inline constexpr IsoHeader kFunctionalRequestHeader{0x68, 0x6A, 0xF1};

struct Iso9141Frame {
    IsoHeader header;
    std::vector<std::uint8_t> payload;
    std::uint8_t checksum = 0;

    std::vector<std::uint8_t> to_bytes() const;

    friend bool operator==(const Iso9141Frame&, const Iso9141Frame&) = default;
};

/// Additive 8-bit checksum (sum of bytes modulo 256). Throws EmptyInput.
std::uint8_t checksum(std::span<const std::uint8_t> bytes);

/// Throws PayloadTooLong for more than 7 payload bytes, EmptyInput for none.
Iso9141Frame frame_iso9141(IsoHeader header, std::span<const std::uint8_t> payload);

/// Inverse of frame_iso9141().to_bytes(). Throws TooShort or ChecksumMismatch.
Iso9141Frame unframe_iso9141(std::span<const std::uint8_t> raw);

} // namespace obdfleet::codec
