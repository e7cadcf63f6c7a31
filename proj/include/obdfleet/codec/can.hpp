#pragma once

// Simplified CAN data-frame layout used for the OBD-II CAN transport:
//   identifier (11 or 29 bits, MSB first) | data (64 bits) | CRC-15
// Control/ack/EOF fields and bit stuffing are not modelled.

#include <array>
#include <cstdint>
#include <span>
#include <vector>

namespace obdfleet::codec {

enum class IdWidth : std::uint8_t { Standard11 = 11, Extended29 = 29 };

inline constexpr std::size_t kCanDataBytes = 8;
inline constexpr std::size_t kCanCrcBits = 15;
inline constexpr std::uint16_t kCan15Polynomial = 0x4599;

/// OBD-II functional broadcast request id (11-bit).
inline constexpr std::uint32_t kObdFunctionalRequestId = 0x7DF;

struct CanFrame {
    std::uint32_t identifier = 0;
    IdWidth id_width = IdWidth::Standard11;
    std::array<std::uint8_t, kCanDataBytes> data{};
    std::uint16_t checksum_bits = 0; // filled by decode_can_frame / with_crc

    friend bool operator==(const CanFrame&, const CanFrame&) = default;
};

using CanBits = std::vector<bool>;

/// CRC-15/CAN (poly 0x4599, init 0) over a bit sequence, shift-register form.
std::uint16_t crc15_can(const CanBits& bits);

/// Throws IdentifierOverflow when the identifier does not fit its width.
CanBits encode_can_frame(const CanFrame& frame);

/// Width is inferred from the bit count (90 or 108). Throws TooShort for
/// any other length and CrcMismatch on a bad CRC field.
CanFrame decode_can_frame(const CanBits& bits);

/// Copy of frame with checksum_bits set to the CRC of its encoding.
CanFrame with_crc(CanFrame frame);

} // namespace obdfleet::codec
