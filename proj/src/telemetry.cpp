#include "obdfleet/telemetry.hpp"

#include "obdfleet/error.hpp"

#include <json.hpp>

namespace obdfleet {

using nlohmann::json;

namespace {

template <typename T>
T required(const json& j, const char* key)
{
    const auto it = j.find(key);
    if (it == j.end() || it->is_null()) {
        throw Error(Errc::MalformedRecord, std::string("missing field '") + key + "'");
    }
    return it->get<T>();
}

} // namespace

std::string to_wire(const TelemetrySample& s)
{
    json j = {
        {"vehicle_id", s.vehicle_id},
        {"seq", s.seq},
        {"timestamp", s.timestamp_ms},
        {"speed_kmh", s.speed_kmh},
        {"maf_gs", s.maf_gs},
        {"fuel_l_per_km", s.fuel_l_per_km ? json(*s.fuel_l_per_km) : json(nullptr)},
        {"cumulative_distance_km", s.cumulative_distance_km},
    };
    if (s.fix) {
        j["lat"] = s.fix->latitude;
        j["lon"] = s.fix->longitude;
        j["fix_utc"] = s.fix->utc_time.millis;
        j["fix_status"] = s.fix->valid() ? "A" : "V";
    } else {
        j["lat"] = nullptr;
        j["lon"] = nullptr;
        j["fix_utc"] = nullptr;
        j["fix_status"] = nullptr;
    }
    return j.dump();
}

TelemetrySample from_wire(std::string_view line)
{
    json j;
    try {
        j = json::parse(line);
    } catch (const json::parse_error& e) {
        throw Error(Errc::MalformedRecord, e.what());
    }
    if (!j.is_object()) throw Error(Errc::MalformedRecord, "record is not a JSON object");

    try {
        TelemetrySample s;
        s.vehicle_id = required<std::string>(j, "vehicle_id");
        if (s.vehicle_id.empty()) throw Error(Errc::MalformedRecord, "empty vehicle_id");
        if (!j["seq"].is_number_unsigned() && !(j["seq"].is_number_integer() && j["seq"].get<std::int64_t>() >= 0)) {
            throw Error(Errc::MalformedRecord, "seq must be a non-negative integer");
        }
        s.seq = required<std::uint64_t>(j, "seq");
        s.timestamp_ms = required<std::int64_t>(j, "timestamp");
        s.speed_kmh = required<double>(j, "speed_kmh");
        s.maf_gs = required<double>(j, "maf_gs");
        s.cumulative_distance_km = required<double>(j, "cumulative_distance_km");
        if (s.speed_kmh < 0 || s.maf_gs < 0 || s.cumulative_distance_km < 0) {
            throw Error(Errc::MalformedRecord, "negative measurement");
        }
        if (auto it = j.find("fuel_l_per_km"); it != j.end() && !it->is_null()) {
            s.fuel_l_per_km = it->get<double>();
        }
        if (auto it = j.find("fix_status"); it != j.end() && !it->is_null()) {
            nmea::GeoFix fix;
            const auto status = it->get<std::string>();
            if (status != "A" && status != "V") throw Error(Errc::MalformedRecord, "fix_status must be A or V");
            fix.status = status == "A" ? nmea::FixStatus::Valid : nmea::FixStatus::Void;
            fix.latitude = required<double>(j, "lat");
            fix.longitude = required<double>(j, "lon");
            fix.utc_time.millis = required<std::uint32_t>(j, "fix_utc");
            s.fix = fix;
        }
        return s;
    } catch (const json::exception& e) {
        throw Error(Errc::MalformedRecord, e.what());
    }
}

} // namespace obdfleet
