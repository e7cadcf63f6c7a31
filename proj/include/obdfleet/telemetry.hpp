#pragma once

#include "obdfleet/nmea/gll.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace obdfleet {

/// One polled record, produced by the agent at the poll cadence.
struct TelemetrySample {
    std::string vehicle_id;
    std::uint64_t seq = 0;
    std::int64_t timestamp_ms = 0; // agent clock, UTC
    double speed_kmh = 0.0;
    double maf_gs = 0.0;
    std::optional<double> fuel_l_per_km; // empty when speed is zero
    double cumulative_distance_km = 0.0;
    std::optional<nmea::GeoFix> fix;

    friend bool operator==(const TelemetrySample&, const TelemetrySample&) = default;
};

/// Flat JSON object on one line, no trailing newline. Keys:
/// vehicle_id, seq, timestamp, speed_kmh, maf_gs, fuel_l_per_km,
/// cumulative_distance_km, lat, lon, fix_utc, fix_status.
std::string to_wire(const TelemetrySample& sample);

/// Throws Errc::MalformedRecord on anything that is not a well-formed record.
TelemetrySample from_wire(std::string_view line);

} // namespace obdfleet
