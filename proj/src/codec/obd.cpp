#include "obdfleet/codec/obd.hpp"

#include "obdfleet/error.hpp"

#include <cctype>
#include <cmath>

namespace obdfleet::codec {

namespace {

constexpr char kHexDigits[] = "0123456789ABCDEF";

int hex_value(char c)
{
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    return -1;
}

void append_hex(std::string& out, std::uint8_t byte)
{
    out.push_back(kHexDigits[byte >> 4]);
    out.push_back(kHexDigits[byte & 0x0F]);
}

std::string_view trim_line(std::string_view line)
{
    auto is_noise = [](char c) {
        return c == '\r' || c == '\n' || c == '>' || std::isspace(static_cast<unsigned char>(c));
    };
    while (!line.empty() && is_noise(line.front())) line.remove_prefix(1);
    while (!line.empty() && is_noise(line.back())) line.remove_suffix(1);
    return line;
}

} // namespace

ObdRequest::ObdRequest(std::uint8_t mode, Pid pid) : mode_(mode), pid_(pid)
{
    if (mode < 0x01 || mode > 0x0A) {
        throw Error(Errc::InvalidMode, "diagnostic mode must be 01..0A, got " + std::to_string(mode));
    }
}

MafGramsPerSec MafGramsPerSec::from_grams_per_sec(double gs)
{
    if (!(gs >= 0.0) || gs > 655.35 + 0.005) {
        throw Error(Errc::OutOfRange, "MAF outside 0..655.35 g/s");
    }
    return MafGramsPerSec{static_cast<std::uint16_t>(std::lround(gs * 100.0))};
}

std::string format_hex(std::span<const std::uint8_t> bytes, bool spaces_enabled)
{
    std::string out;
    out.reserve(bytes.size() * 3);
    for (std::size_t i = 0; i < bytes.size(); ++i) {
        if (spaces_enabled && i != 0) out.push_back(' ');
        append_hex(out, bytes[i]);
    }
    return out;
}

std::string encode_request(const ObdRequest& req, bool spaces_enabled)
{
    const std::uint8_t bytes[] = {req.mode(), req.pid_code()};
    return format_hex(bytes, spaces_enabled) + '\r';
}

std::vector<std::uint8_t> parse_hex_bytes(std::string_view text)
{
    std::vector<std::uint8_t> bytes;
    std::size_t i = 0;
    while (i < text.size()) {
        if (std::isspace(static_cast<unsigned char>(text[i]))) {
            ++i;
            continue;
        }
        std::size_t end = i;
        while (end < text.size() && !std::isspace(static_cast<unsigned char>(text[end]))) ++end;
        const auto token = text.substr(i, end - i);
        if (token.size() % 2 != 0) {
            throw Error(Errc::MalformedHex, "odd-length hex token '" + std::string(token) + "'");
        }
        for (std::size_t k = 0; k < token.size(); k += 2) {
            const int hi = hex_value(token[k]);
            const int lo = hex_value(token[k + 1]);
            if (hi < 0 || lo < 0) {
                throw Error(Errc::MalformedHex, "non-hex token '" + std::string(token) + "'");
            }
            bytes.push_back(static_cast<std::uint8_t>(hi << 4 | lo));
        }
        i = end;
    }
    return bytes;
}

ObdResponse parse_response(std::string_view line, const ObdRequest& expected)
{
    line = trim_line(line);
    if (line.find("NO DATA") != std::string_view::npos) {
        throw Error(Errc::NoData, "ECU replied NO DATA");
    }
    auto bytes = parse_hex_bytes(line);
    if (bytes.size() < 2) {
        throw Error(Errc::MalformedHex, "response needs at least mode and PID bytes");
    }
    if (bytes.size() > 2 + kMaxResponseData) {
        throw Error(Errc::MalformedHex, "response carries more than 7 data bytes");
    }
    const std::uint8_t want_mode = expected.mode() + kPositiveResponseOffset;
    if (bytes[0] != want_mode) {
        throw Error(Errc::ModeMismatch, "expected mode byte " + format_hex({&want_mode, 1}, false) +
                                            ", got " + format_hex({bytes.data(), 1}, false));
    }
    if (bytes[1] != expected.pid_code()) {
        const std::uint8_t want_pid = expected.pid_code();
        throw Error(Errc::PidMismatch, "expected PID " + format_hex({&want_pid, 1}, false) +
                                           ", got " + format_hex({bytes.data() + 1, 1}, false));
    }
    ObdResponse resp;
    resp.mode_echo = bytes[0];
    resp.pid_echo = bytes[1];
    resp.data.assign(bytes.begin() + 2, bytes.end());
    return resp;
}

SpeedKmh decode_speed(const ObdResponse& resp)
{
    if (resp.pid_echo != static_cast<std::uint8_t>(Pid::Speed)) {
        throw Error(Errc::WrongPid, "speed decode needs PID 0D");
    }
    if (resp.data.empty()) {
        throw Error(Errc::EmptyData, "speed response has no data byte");
    }
    return SpeedKmh{resp.data[0]};
}

MafGramsPerSec decode_maf(const ObdResponse& resp)
{
    if (resp.pid_echo != static_cast<std::uint8_t>(Pid::Maf)) {
        throw Error(Errc::WrongPid, "MAF decode needs PID 10");
    }
    if (resp.data.size() < 2) {
        throw Error(Errc::InsufficientData, "MAF response needs bytes A and B");
    }
    return MafGramsPerSec{static_cast<std::uint16_t>(resp.data[0] * 256 + resp.data[1])};
}

ObdResponse make_response(const ObdRequest& req, std::span<const std::uint8_t> data)
{
    if (data.size() > kMaxResponseData) {
        throw Error(Errc::PayloadTooLong, "response data is limited to 7 bytes");
    }
    ObdResponse resp;
    resp.mode_echo = req.mode() + kPositiveResponseOffset;
    resp.pid_echo = req.pid_code();
    resp.data.assign(data.begin(), data.end());
    return resp;
}

} // namespace obdfleet::codec
