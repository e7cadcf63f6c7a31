#include "obdfleet/codec/obd.hpp"

#include "test_util.hpp"

using namespace obdfleet;
using namespace obdfleet::codec;

namespace {
const ObdRequest kSpeedReq{kCurrentDataMode, Pid::Speed};
const ObdRequest kMafReq{kCurrentDataMode, Pid::Maf};
} // namespace

TEST(ObdRequest, EncodesUppercaseHexWithCarriageReturn)
{
    EXPECT_EQ(encode_request(kSpeedReq), "010D\r");
    EXPECT_EQ(encode_request(kSpeedReq, true), "01 0D\r");
    EXPECT_EQ(encode_request({0x01, Pid::SupportedPids}), "0100\r");
    EXPECT_EQ(encode_request(kMafReq), "0110\r");
    EXPECT_EQ(encode_request({0x0A, std::uint8_t{0xAB}}, true), "0A AB\r");
}

TEST(ObdRequest, RejectsModesOutsideTheTenDiagnosticModes)
{
    EXPECT_ERRC(ObdRequest(0x00, Pid::Speed), Errc::InvalidMode);
    EXPECT_ERRC(ObdRequest(0x0B, Pid::Speed), Errc::InvalidMode);
    for (int m = 1; m <= 0x0A; ++m) EXPECT_NO_THROW(ObdRequest(static_cast<std::uint8_t>(m), Pid::Speed));
}

TEST(ParseResponse, WorkedSpeedExample)
{
    const auto r = parse_response("41 0D 32", kSpeedReq);
    EXPECT_EQ(r.mode_echo, 0x41);
    EXPECT_EQ(r.pid_echo, 0x0D);
    EXPECT_EQ(r.data, std::vector<std::uint8_t>{0x32});
    EXPECT_EQ(parse_response("41 0D 00", kSpeedReq).data, std::vector<std::uint8_t>{0x00});
}

TEST(ParseResponse, ToleratesCaseSpacingAndPrompt)
{
    const auto want = parse_response("41 10 01 7C", kMafReq);
    EXPECT_EQ(parse_response("4110017C", kMafReq), want);
    EXPECT_EQ(parse_response("41 10 01 7c\r\r>", kMafReq), want);
    EXPECT_EQ(parse_response("  41 10 017C \r", kMafReq), want);
}

TEST(ParseResponse, Errors)
{
    EXPECT_ERRC(parse_response("42 0D 32", kSpeedReq), Errc::ModeMismatch);
    EXPECT_ERRC(parse_response("41 0C 32", kSpeedReq), Errc::PidMismatch);
    EXPECT_ERRC(parse_response("41 0D 3G", kSpeedReq), Errc::MalformedHex);
    EXPECT_ERRC(parse_response("41 0D 3", kSpeedReq), Errc::MalformedHex);
    EXPECT_ERRC(parse_response("41", kSpeedReq), Errc::MalformedHex);
    EXPECT_ERRC(parse_response("NO DATA", kSpeedReq), Errc::NoData);
    EXPECT_ERRC(parse_response("NO DATA\r\r>", kSpeedReq), Errc::NoData);
    EXPECT_ERRC(parse_response("41 0D 01 02 03 04 05 06 07 08", kSpeedReq), Errc::MalformedHex);
}

TEST(ParseResponse, PidMismatchNamesBothPids)
{
    try {
        parse_response("41 0C 32", kSpeedReq);
        FAIL();
    } catch (const Error& e) {
        const std::string what = e.what();
        EXPECT_NE(what.find("0D"), std::string::npos) << what;
        EXPECT_NE(what.find("0C"), std::string::npos) << what;
    }
}

TEST(DecodeSpeed, Examples)
{
    EXPECT_EQ(decode_speed(parse_response("41 0D 32", kSpeedReq)).value, 50);
    EXPECT_EQ(decode_speed(parse_response("41 0D 00", kSpeedReq)).value, 0);
    EXPECT_EQ(decode_speed(parse_response("41 0D FF", kSpeedReq)).value, 255);
}

TEST(DecodeSpeed, IsByteAForEveryValue)
{
    for (int a = 0; a < 256; ++a) {
        const std::uint8_t data[] = {static_cast<std::uint8_t>(a)};
        EXPECT_EQ(decode_speed(make_response(kSpeedReq, data)).value, a);
    }
}

TEST(DecodeSpeed, Errors)
{
    EXPECT_ERRC(decode_speed(parse_response("41 0D", kSpeedReq)), Errc::EmptyData);
    EXPECT_ERRC(decode_speed(parse_response("41 10 01 7C", kMafReq)), Errc::WrongPid);
}

TEST(DecodeMaf, Examples)
{
    EXPECT_EQ(decode_maf(parse_response("41 10 01 7C", kMafReq)).hundredths(), 380);
    EXPECT_DOUBLE_EQ(decode_maf(parse_response("41 10 01 7C", kMafReq)).grams_per_sec(), 3.80);
    EXPECT_EQ(decode_maf(parse_response("41 10 00 00", kMafReq)).hundredths(), 0);
    EXPECT_DOUBLE_EQ(decode_maf(parse_response("41 10 FF FF", kMafReq)).grams_per_sec(), 655.35);
}

TEST(DecodeMaf, Errors)
{
    EXPECT_ERRC(decode_maf(parse_response("41 10 01", kMafReq)), Errc::InsufficientData);
    EXPECT_ERRC(decode_maf(parse_response("41 10", kMafReq)), Errc::InsufficientData);
    EXPECT_ERRC(decode_maf(parse_response("41 0D 32", kSpeedReq)), Errc::WrongPid);
}

TEST(DecodeMaf, ExhaustiveAgainstTextbookFormula)
{
    for (int a = 0; a < 256; ++a) {
        for (int b = 0; b < 256; ++b) {
            // Oracle: decimal text of the two-byte value with the point moved two places.
            const int raw = a * 256 + b;
            const double oracle = std::stod(std::to_string(raw / 100) + "." + (raw % 100 < 10 ? "0" : "") +
                                            std::to_string(raw % 100));
            const std::uint8_t data[] = {static_cast<std::uint8_t>(a), static_cast<std::uint8_t>(b)};
            const auto maf = decode_maf(make_response(kMafReq, data));
            ASSERT_EQ(maf.hundredths(), raw);
            ASSERT_EQ(maf.grams_per_sec(), oracle) << a << "," << b;
        }
    }
}

TEST(MafGramsPerSec, FromGramsRoundsToHundredths)
{
    EXPECT_EQ(MafGramsPerSec::from_grams_per_sec(3.8).hundredths(), 380);
    EXPECT_EQ(MafGramsPerSec::from_grams_per_sec(655.35).hundredths(), 65535);
    EXPECT_ERRC(MafGramsPerSec::from_grams_per_sec(655.36), Errc::OutOfRange);
    EXPECT_ERRC(MafGramsPerSec::from_grams_per_sec(-0.01), Errc::OutOfRange);
}

TEST(ObdResponse, EchoPropertyForEveryModeAndPid)
{
    auto& gen = testutil::rng();
    std::uniform_int_distribution<int> byte(0, 255), len(0, 7);
    for (int mode = 1; mode <= 0x0A; ++mode) {
        for (int pid = 0; pid < 256; ++pid) {
            const ObdRequest req(static_cast<std::uint8_t>(mode), static_cast<std::uint8_t>(pid));
            std::vector<std::uint8_t> data(static_cast<std::size_t>(len(gen)));
            for (auto& d : data) d = static_cast<std::uint8_t>(byte(gen));
            const auto built = make_response(req, data);
            for (bool spaces : {false, true}) {
                std::vector<std::uint8_t> wire = {built.mode_echo, built.pid_echo};
                wire.insert(wire.end(), data.begin(), data.end());
                const auto parsed = parse_response(format_hex(wire, spaces), req);
                ASSERT_EQ(parsed.mode_echo, mode + 0x40);
                ASSERT_EQ(parsed.pid_echo, pid);
                ASSERT_EQ(parsed.data, data);
            }
        }
    }
}

TEST(Hex, FormatAndParse)
{
    const std::vector<std::uint8_t> bytes = {0x41, 0x0D, 0x32};
    EXPECT_EQ(format_hex(bytes, true), "41 0D 32");
    EXPECT_EQ(format_hex(bytes, false), "410D32");
    EXPECT_EQ(parse_hex_bytes("41 0d\t32"), bytes);
    EXPECT_TRUE(parse_hex_bytes("").empty());
}
