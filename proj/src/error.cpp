#include "obdfleet/error.hpp"

namespace obdfleet {

std::string_view to_string(Errc code) noexcept
{
    switch (code) {
    case Errc::InvalidMode: return "InvalidMode";
    case Errc::MalformedHex: return "MalformedHex";
    case Errc::ModeMismatch: return "ModeMismatch";
    case Errc::PidMismatch: return "PidMismatch";
    case Errc::NoData: return "NoData";
    case Errc::WrongPid: return "WrongPid";
    case Errc::EmptyData: return "EmptyData";
    case Errc::InsufficientData: return "InsufficientData";
    case Errc::EmptyInput: return "EmptyInput";
    case Errc::PayloadTooLong: return "PayloadTooLong";
    case Errc::ChecksumMismatch: return "ChecksumMismatch";
    case Errc::TooShort: return "TooShort";
    case Errc::IdentifierOverflow: return "IdentifierOverflow";
    case Errc::CrcMismatch: return "CrcMismatch";
    case Errc::BadChecksum: return "BadChecksum";
    case Errc::WrongSentenceType: return "WrongSentenceType";
    case Errc::MalformedField: return "MalformedField";
    case Errc::OutOfRange: return "OutOfRange";
    case Errc::NonPositiveDt: return "NonPositiveDt";
    case Errc::EmptyTrip: return "EmptyTrip";
    case Errc::NonMonotonicTimestamps: return "NonMonotonicTimestamps";
    case Errc::ScenarioParse: return "ScenarioParse";
    case Errc::TimedOut: return "TimedOut";
    case Errc::HandshakeTimeout: return "HandshakeTimeout";
    case Errc::UnexpectedReply: return "UnexpectedReply";
    case Errc::PidReadError: return "PidReadError";
    case Errc::LinkDown: return "LinkDown";
    case Errc::MalformedRecord: return "MalformedRecord";
    case Errc::StorageFailure: return "StorageFailure";
    case Errc::UnknownVehicle: return "UnknownVehicle";
    case Errc::NoFixAvailable: return "NoFixAvailable";
    case Errc::InvalidRange: return "InvalidRange";
    }
    return "Unknown";
}

} // namespace obdfleet
