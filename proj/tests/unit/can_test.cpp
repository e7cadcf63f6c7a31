#include "obdfleet/codec/can.hpp"

#include "test_util.hpp"

using namespace obdfleet;
using namespace obdfleet::codec;

namespace {

// Remainder of m(x)·x^15 modulo x^15 + 0x4599, by textbook long division.
std::uint16_t crc15_long_division(const std::vector<bool>& message)
{
    std::vector<bool> work = message;
    work.resize(message.size() + 15, false);
    const std::uint32_t generator = (1u << 15) | 0x4599u; // 16 coefficients
    for (std::size_t i = 0; i < message.size(); ++i) {
        if (!work[i]) continue;
        for (int k = 0; k < 16; ++k) {
            if (generator >> (15 - k) & 1u) work[i + static_cast<std::size_t>(k)] = !work[i + static_cast<std::size_t>(k)];
        }
    }
    std::uint16_t rem = 0;
    for (std::size_t i = message.size(); i < work.size(); ++i) rem = static_cast<std::uint16_t>(rem << 1 | work[i]);
    return rem;
}

std::vector<bool> bits_of(std::string_view text)
{
    std::vector<bool> bits;
    for (unsigned char c : text) {
        for (int b = 7; b >= 0; --b) bits.push_back(c >> b & 1);
    }
    return bits;
}

CanFrame random_frame(IdWidth width)
{
    auto& gen = testutil::rng();
    std::uniform_int_distribution<std::uint32_t> id(0, width == IdWidth::Standard11 ? 0x7FF : 0x1FFFFFFF);
    std::uniform_int_distribution<int> byte(0, 255);
    CanFrame f;
    f.identifier = id(gen);
    f.id_width = width;
    for (auto& d : f.data) d = static_cast<std::uint8_t>(byte(gen));
    return f;
}

} // namespace

TEST(Crc15, OracleMatchesPublishedCheckValue)
{
    EXPECT_EQ(crc15_long_division(bits_of("123456789")), 0x059E);
}

TEST(Crc15, MatchesLongDivision)
{
    EXPECT_EQ(crc15_can(bits_of("123456789")), 0x059E);
    EXPECT_EQ(crc15_can({}), 0);
    auto& gen = testutil::rng();
    std::uniform_int_distribution<int> len(0, 140), bit(0, 1);
    for (int i = 0; i < 2000; ++i) {
        std::vector<bool> m(static_cast<std::size_t>(len(gen)));
        for (std::size_t k = 0; k < m.size(); ++k) m[k] = bit(gen);
        ASSERT_EQ(crc15_can(m), crc15_long_division(m));
    }
}

TEST(CanFrame, ObdFunctionalRequestLayout)
{
    CanFrame f;
    f.identifier = kObdFunctionalRequestId;
    f.data = {0x02, 0x01, 0x0D, 0, 0, 0, 0, 0};
    const auto bits = encode_can_frame(f);
    ASSERT_EQ(bits.size(), 11u + 64u + 15u);

    std::uint32_t id = 0;
    for (int i = 0; i < 11; ++i) id = id << 1 | bits[static_cast<std::size_t>(i)];
    EXPECT_EQ(id, 0x7DFu);
    const std::vector<bool> body(bits.begin(), bits.begin() + 75);
    std::uint16_t crc = 0;
    for (std::size_t i = 75; i < 90; ++i) crc = static_cast<std::uint16_t>(crc << 1 | bits[i]);
    EXPECT_EQ(crc, crc15_long_division(body));

    const auto back = decode_can_frame(bits);
    EXPECT_EQ(back, with_crc(f));
    EXPECT_EQ(back.checksum_bits, crc);
}

TEST(CanFrame, AllZeroRoundTrips)
{
    for (auto width : {IdWidth::Standard11, IdWidth::Extended29}) {
        CanFrame f;
        f.id_width = width;
        const auto bits = encode_can_frame(f);
        EXPECT_EQ(bits.size(), static_cast<std::size_t>(width) + 64 + 15);
        EXPECT_EQ(decode_can_frame(bits), with_crc(f));
        EXPECT_EQ(decode_can_frame(bits).checksum_bits, 0);
    }
}

TEST(CanFrame, IdentifierOverflow)
{
    CanFrame f;
    f.identifier = 1u << 11;
    EXPECT_ERRC(encode_can_frame(f), Errc::IdentifierOverflow);
    f.id_width = IdWidth::Extended29;
    EXPECT_NO_THROW(encode_can_frame(f));
    f.identifier = 1u << 29;
    EXPECT_ERRC(encode_can_frame(f), Errc::IdentifierOverflow);
}

TEST(CanFrame, DecodeRejectsBadLengthAndCrc)
{
    EXPECT_ERRC(decode_can_frame(std::vector<bool>(89)), Errc::TooShort);
    EXPECT_ERRC(decode_can_frame(std::vector<bool>(91)), Errc::TooShort);
    auto bits = encode_can_frame(random_frame(IdWidth::Standard11));
    bits.back() = !bits.back();
    EXPECT_ERRC(decode_can_frame(bits), Errc::CrcMismatch);
}

TEST(CanFrame, RandomRoundTripBothWidths)
{
    for (auto width : {IdWidth::Standard11, IdWidth::Extended29}) {
        for (int i = 0; i < 2000; ++i) {
            const auto f = random_frame(width);
            ASSERT_EQ(decode_can_frame(encode_can_frame(f)), with_crc(f));
        }
    }
}

TEST(CanFrame, EverySingleBitFlipIsDetected)
{
    for (auto width : {IdWidth::Standard11, IdWidth::Extended29}) {
        const auto bits = encode_can_frame(random_frame(width));
        for (std::size_t i = 0; i < bits.size(); ++i) {
            auto bad = bits;
            bad[i] = !bad[i];
            EXPECT_ERRC(decode_can_frame(bad), Errc::CrcMismatch);
        }
    }
}
