#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace obdfleet {

/// Every failure the library reports carries one of these codes. Callers
/// branch on the code; the message is for humans.
enum class Errc {
    // obd codec
    InvalidMode,
    MalformedHex,
    ModeMismatch,
    PidMismatch,
    NoData,
    WrongPid,
    EmptyData,
    InsufficientData,
    EmptyInput,
    PayloadTooLong,
    ChecksumMismatch,
    TooShort,
    IdentifierOverflow,
    CrcMismatch,
    // nmea
    BadChecksum,
    WrongSentenceType,
    MalformedField,
    OutOfRange,
    // metrics
    NonPositiveDt,
    EmptyTrip,
    NonMonotonicTimestamps,
    // emulator / scenario
    ScenarioParse,
    // transport / agent
    TimedOut,
    HandshakeTimeout,
    UnexpectedReply,
    PidReadError,
    LinkDown,
    // server
    MalformedRecord,
    StorageFailure,
    UnknownVehicle,
    NoFixAvailable,
    InvalidRange,
};

std::string_view to_string(Errc code) noexcept;

class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    Errc code() const noexcept { return code_; }

private:
    Errc code_;
};

} // namespace obdfleet
