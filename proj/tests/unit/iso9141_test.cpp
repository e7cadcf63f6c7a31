#include "obdfleet/codec/iso9141.hpp"

#include "test_util.hpp"

#include <numeric>

using namespace obdfleet;
using namespace obdfleet::codec;

namespace {
using Bytes = std::vector<std::uint8_t>;

std::uint8_t oracle_sum(const Bytes& b)
{
    return static_cast<std::uint8_t>(std::accumulate(b.begin(), b.end(), 0u) % 256u);
}
} // namespace

TEST(IsoChecksum, Examples)
{
    EXPECT_EQ(checksum(Bytes{0x01}), 0x01);
    EXPECT_EQ(checksum(Bytes{0xFF, 0x01}), 0x00);
    // 0x68 + 0x6A + 0xF1 + 0x01 + 0x0D = 0x2D1
    EXPECT_EQ(checksum(Bytes{0x68, 0x6A, 0xF1, 0x01, 0x0D}), 0xD1);
    EXPECT_ERRC(checksum(Bytes{}), Errc::EmptyInput);
}

TEST(IsoFrame, FunctionalSpeedRequest)
{
    const Bytes payload{0x01, 0x0D};
    const auto f = frame_iso9141(kFunctionalRequestHeader, payload);
    EXPECT_EQ(f.checksum, 0xD1);
    EXPECT_EQ(f.to_bytes(), (Bytes{0x68, 0x6A, 0xF1, 0x01, 0x0D, 0xD1}));

    const auto back = unframe_iso9141(f.to_bytes());
    EXPECT_EQ(back.header, kFunctionalRequestHeader);
    EXPECT_EQ(back.payload, payload);
}

TEST(IsoFrame, Errors)
{
    EXPECT_ERRC(frame_iso9141(kFunctionalRequestHeader, Bytes(8, 0x11)), Errc::PayloadTooLong);
    EXPECT_ERRC(frame_iso9141(kFunctionalRequestHeader, Bytes{}), Errc::EmptyInput);
    EXPECT_ERRC(unframe_iso9141(Bytes{0x68, 0x6A, 0xF1}), Errc::TooShort);
    EXPECT_ERRC(unframe_iso9141(Bytes{0x68, 0x6A, 0xF1, 0x01}), Errc::TooShort);

    auto raw = frame_iso9141(kFunctionalRequestHeader, Bytes{0x01, 0x0D}).to_bytes();
    raw.back() ^= 0x01;
    EXPECT_ERRC(unframe_iso9141(raw), Errc::ChecksumMismatch);

    Bytes too_long(12, 0);
    too_long.back() = oracle_sum(Bytes(too_long.begin(), too_long.end() - 1));
    EXPECT_ERRC(unframe_iso9141(too_long), Errc::PayloadTooLong);
}

TEST(IsoFrame, RandomRoundTrip)
{
    auto& gen = testutil::rng();
    std::uniform_int_distribution<int> byte(0, 255), len(1, 7);
    for (int i = 0; i < 5000; ++i) {
        const IsoHeader h{static_cast<std::uint8_t>(byte(gen)), static_cast<std::uint8_t>(byte(gen)),
                          static_cast<std::uint8_t>(byte(gen))};
        Bytes payload(static_cast<std::size_t>(len(gen)));
        for (auto& b : payload) b = static_cast<std::uint8_t>(byte(gen));
        const auto f = frame_iso9141(h, payload);
        Bytes all{h.priority, h.receiver, h.transmitter};
        all.insert(all.end(), payload.begin(), payload.end());
        ASSERT_EQ(f.checksum, oracle_sum(all));
        ASSERT_EQ(unframe_iso9141(f.to_bytes()), f);
    }
}

TEST(IsoFrame, EverySingleBitFlipIsDetected)
{
    const Bytes payloads[] = {{0x01, 0x0D}, {0x41, 0x0D, 0x32}, {0xFF, 0x00, 0xFF, 0x00, 0xFF, 0x00, 0xFF}, {0x00}};
    for (const auto& p : payloads) {
        const auto raw = frame_iso9141(kFunctionalRequestHeader, p).to_bytes();
        for (std::size_t i = 0; i < raw.size(); ++i) {
            for (int bit = 0; bit < 8; ++bit) {
                auto bad = raw;
                bad[i] ^= static_cast<std::uint8_t>(1u << bit);
                EXPECT_ERRC(unframe_iso9141(bad), Errc::ChecksumMismatch);
            }
        }
    }
}
