#pragma once

// SAE J1979 request/response codec for the ELM327 ASCII dialect.

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace obdfleet::codec {

/// Parameter identifier. Any byte is a valid code; the named ones are the
/// PIDs this project knows about.
enum class Pid : std::uint8_t {
    SupportedPids = 0x00,
    Speed = 0x0D,
    Maf = 0x10,
    FuelFlow = 0x5E, // recognised, never decoded
};

inline constexpr std::uint8_t kCurrentDataMode = 0x01;
inline constexpr std::uint8_t kPositiveResponseOffset = 0x40;
inline constexpr std::size_t kMaxResponseData = 7;

/// Mode + PID. Modes are restricted to the ten J1979 diagnostic modes.
class ObdRequest {
public:
    /// Throws Errc::InvalidMode unless 0x01 <= mode <= 0x0A.
    ObdRequest(std::uint8_t mode, Pid pid);
    ObdRequest(std::uint8_t mode, std::uint8_t pid) : ObdRequest(mode, Pid{pid}) {}

    std::uint8_t mode() const noexcept { return mode_; }
    Pid pid() const noexcept { return pid_; }
    std::uint8_t pid_code() const noexcept { return static_cast<std::uint8_t>(pid_); }

    friend bool operator==(const ObdRequest&, const ObdRequest&) = default;

private:
    std::uint8_t mode_;
    Pid pid_;
};

struct ObdResponse {
    std::uint8_t mode_echo = 0;
    std::uint8_t pid_echo = 0;
    std::vector<std::uint8_t> data; // bytes A, B, C, D ...

    friend bool operator==(const ObdResponse&, const ObdResponse&) = default;
};

/// Vehicle speed, one data byte.
struct SpeedKmh {
    std::uint8_t value = 0;
    friend auto operator<=>(const SpeedKmh&, const SpeedKmh&) = default;
};

/// Mass air flow held as hundredths of g/s so the 0.01 resolution is exact.
class MafGramsPerSec {
public:
    constexpr MafGramsPerSec() = default;
    constexpr explicit MafGramsPerSec(std::uint16_t hundredths) : hundredths_(hundredths) {}

    /// Rounds to the nearest 0.01 g/s; throws Errc::OutOfRange outside [0, 655.35].
    static MafGramsPerSec from_grams_per_sec(double gs);

    constexpr std::uint16_t hundredths() const noexcept { return hundredths_; }
    constexpr double grams_per_sec() const noexcept { return hundredths_ / 100.0; }

    friend auto operator<=>(const MafGramsPerSec&, const MafGramsPerSec&) = default;

private:
    std::uint16_t hundredths_ = 0;
};

/// "010D\r", or "01 0D\r" with spaces on.
std::string encode_request(const ObdRequest& req, bool spaces_enabled = false);

/// Parses an ECU reply line. Tolerates case, optional spaces, trailing CR
/// and the '>' prompt.
ObdResponse parse_response(std::string_view line, const ObdRequest& expected);

SpeedKmh decode_speed(const ObdResponse& resp);
MafGramsPerSec decode_maf(const ObdResponse& resp);

/// Builds the mode-01 positive response bytes for a PID and its data.
ObdResponse make_response(const ObdRequest& req, std::span<const std::uint8_t> data);

/// Renders response bytes as uppercase hex pairs, e.g. "41 0D 32".
std::string format_hex(std::span<const std::uint8_t> bytes, bool spaces_enabled);

/// Parses whitespace-separated hex pairs ("41 0D 32", "410d32").
std::vector<std::uint8_t> parse_hex_bytes(std::string_view text);

} // namespace obdfleet::codec
