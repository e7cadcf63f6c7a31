#include "obdfleet/codec/can.hpp"

#include "obdfleet/error.hpp"

#include <string>

namespace obdfleet::codec {

namespace {

constexpr std::size_t width_bits(IdWidth w) { return static_cast<std::size_t>(w); }

void push_bits(CanBits& out, std::uint32_t value, std::size_t count)
{
    for (std::size_t i = count; i-- > 0;) out.push_back((value >> i) & 1u);
}

std::uint32_t read_bits(const CanBits& bits, std::size_t& pos, std::size_t count)
{
    std::uint32_t value = 0;
    for (std::size_t i = 0; i < count; ++i) value = (value << 1) | (bits[pos++] ? 1u : 0u);
    return value;
}

CanBits encode_payload(const CanFrame& frame)
{
    const auto id_bits = width_bits(frame.id_width);
    if (frame.identifier >> id_bits != 0) {
        throw Error(Errc::IdentifierOverflow, "identifier " + std::to_string(frame.identifier) +
                                                  " exceeds " + std::to_string(id_bits) + " bits");
    }
    CanBits bits;
    bits.reserve(id_bits + kCanDataBytes * 8 + kCanCrcBits);
    push_bits(bits, frame.identifier, id_bits);
    for (auto byte : frame.data) push_bits(bits, byte, 8);
    return bits;
}

} // namespace

std::uint16_t crc15_can(const CanBits& bits)
{
    std::uint16_t crc = 0;
    for (bool bit : bits) {
        const bool feedback = bit != (((crc >> 14) & 1u) != 0);
        crc = static_cast<std::uint16_t>((crc << 1) & 0x7FFF);
        if (feedback) crc ^= kCan15Polynomial;
    }
    return crc;
}

CanBits encode_can_frame(const CanFrame& frame)
{
    auto bits = encode_payload(frame);
    push_bits(bits, crc15_can(bits), kCanCrcBits);
    return bits;
}

CanFrame decode_can_frame(const CanBits& bits)
{
    constexpr std::size_t tail = kCanDataBytes * 8 + kCanCrcBits;
    IdWidth width;
    if (bits.size() == width_bits(IdWidth::Standard11) + tail) {
        width = IdWidth::Standard11;
    } else if (bits.size() == width_bits(IdWidth::Extended29) + tail) {
        width = IdWidth::Extended29;
    } else {
        throw Error(Errc::TooShort, "CAN bit sequence has " + std::to_string(bits.size()) +
                                        " bits, expected 90 or 108");
    }

    CanFrame frame;
    frame.id_width = width;
    std::size_t pos = 0;
    frame.identifier = read_bits(bits, pos, width_bits(width));
    for (auto& byte : frame.data) byte = static_cast<std::uint8_t>(read_bits(bits, pos, 8));
    const CanBits covered(bits.begin(), bits.begin() + static_cast<std::ptrdiff_t>(pos));
    frame.checksum_bits = static_cast<std::uint16_t>(read_bits(bits, pos, kCanCrcBits));
    if (crc15_can(covered) != frame.checksum_bits) {
        throw Error(Errc::CrcMismatch, "CAN CRC-15 field does not match");
    }
    return frame;
}

CanFrame with_crc(CanFrame frame)
{
    frame.checksum_bits = crc15_can(encode_payload(frame));
    return frame;
}

} // namespace obdfleet::codec
