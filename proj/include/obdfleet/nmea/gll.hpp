#pragma once

// NMEA 0183 GLL (geographic position) sentences:
//   $<tt>GLL,ddmm.mmmm,N|S,dddmm.mmmm,E|W,hhmmss.sss,A|V[,mode]*HH

#include <cstdint>
#include <string>
#include <string_view>

namespace obdfleet::nmea {

enum class FixStatus : std::uint8_t { Valid, Void };

/// UTC time of day, millisecond resolution.
struct UtcTime {
    std::uint32_t millis = 0; // since midnight

    /// hhmmss or hhmmss.s{1,3}; throws MalformedField / OutOfRange.
    static UtcTime parse(std::string_view text);
    std::string to_string() const;

    friend auto operator<=>(const UtcTime&, const UtcTime&) = default;
};

/// A position fix. Latitude and longitude are signed decimal degrees
/// (south and west negative). Void fixes make no promise about coordinates.
struct GeoFix {
    double latitude = 0.0;
    double longitude = 0.0;
    UtcTime utc_time;
    FixStatus status = FixStatus::Valid;

    bool valid() const noexcept { return status == FixStatus::Valid; }
    friend bool operator==(const GeoFix&, const GeoFix&) = default;
};

/// XOR of the characters between '$' and '*'.
std::uint8_t sentence_checksum(std::string_view body);

/// Accepts any two-letter talker id and an optional trailing CR/LF.
/// Throws BadChecksum, WrongSentenceType, MalformedField or OutOfRange.
GeoFix parse_gll(std::string_view sentence);

/// Emits "$GPGLL,...*HH" without a line terminator. Minutes carry four
/// decimals, so coordinates survive a round trip to better than 2e-6 deg.
std::string render_gll(const GeoFix& fix);

} // namespace obdfleet::nmea
