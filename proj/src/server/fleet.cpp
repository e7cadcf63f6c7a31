#include "obdfleet/server/fleet.hpp"

#include "obdfleet/error.hpp"

#include <json.hpp>

#include <charconv>
#include <string>

namespace obdfleet::server {

using nlohmann::json;

namespace {

std::string number(double v)
{
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

double parse_double(std::string_view s, std::size_t row)
{
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size()) {
        throw Error(Errc::MalformedRecord, "csv row " + std::to_string(row) + ": bad number '" + std::string(s) + "'");
    }
    return v;
}

template <typename Int>
Int parse_int(std::string_view s, std::size_t row)
{
    Int v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size()) {
        throw Error(Errc::MalformedRecord, "csv row " + std::to_string(row) + ": bad integer '" + std::string(s) + "'");
    }
    return v;
}

} // namespace

std::string Ingestor::ingest(std::string_view line)
{
    TelemetrySample sample;
    try {
        sample = from_wire(line);
    } catch (const Error&) {
        return "NAK";
    }
    const auto seq = sample.seq;
    if (!store_->append(StoredSample{std::move(sample), clock_()})) ++duplicates_;
    return "ACK " + std::to_string(seq);
}

std::vector<TelemetrySample> FleetQueries::query_samples(const std::string& vehicle_id, std::int64_t t0,
                                                         std::int64_t t1) const
{
    if (t0 > t1) throw Error(Errc::InvalidRange, "from must not be after to");
    std::vector<TelemetrySample> out;
    for (auto& s : store_->query(vehicle_id, t0, t1)) out.push_back(std::move(s.sample));
    return out;
}

metrics::TripSummary FleetQueries::trip_summary(const std::string& vehicle_id, std::int64_t t0, std::int64_t t1,
                                                std::optional<double> sample_period_s) const
{
    const auto samples = query_samples(vehicle_id, t0, t1);
    return metrics::summarize_trip(samples, sample_period_s.value_or(period_s_));
}

PositionReport FleetQueries::latest_position(const std::string& vehicle_id) const
{
    const auto s = store_->latest_valid_fix(vehicle_id);
    if (!s) throw Error(Errc::NoFixAvailable, "vehicle '" + vehicle_id + "' has no valid fix");
    return {*s->sample.fix, s->sample.timestamp_ms, s->sample.seq};
}

std::string FleetQueries::export_csv(const std::string& vehicle_id, std::int64_t t0, std::int64_t t1) const
{
    return samples_to_csv(query_samples(vehicle_id, t0, t1));
}

std::string FleetQueries::export_json(const std::string& vehicle_id, std::int64_t t0, std::int64_t t1) const
{
    return samples_to_json(query_samples(vehicle_id, t0, t1));
}

std::string samples_to_csv(const std::vector<TelemetrySample>& samples)
{
    std::string out(kCsvHeader);
    out += '\n';
    for (const auto& s : samples) {
        out += std::to_string(s.seq) + ',' + std::to_string(s.timestamp_ms) + ',' + number(s.speed_kmh) + ',' +
               number(s.maf_gs) + ',' + (s.fuel_l_per_km ? number(*s.fuel_l_per_km) : std::string{}) + ',' +
               number(s.cumulative_distance_km) + ',';
        if (s.fix && s.fix->valid()) out += number(s.fix->latitude) + ',' + number(s.fix->longitude);
        else out += ',';
        out += '\n';
    }
    return out;
}

std::vector<TelemetrySample> samples_from_csv(std::string_view csv, const std::string& vehicle_id)
{
    std::vector<TelemetrySample> out;
    std::size_t row = 0;
    while (!csv.empty()) {
        const auto nl = csv.find('\n');
        auto line = csv.substr(0, nl);
        csv = nl == std::string_view::npos ? std::string_view{} : csv.substr(nl + 1);
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (row++ == 0) {
            if (line != kCsvHeader) throw Error(Errc::MalformedRecord, "csv header mismatch");
            continue;
        }
        if (line.empty()) continue;

        std::vector<std::string_view> cells;
        std::size_t start = 0;
        for (;;) {
            const auto comma = line.find(',', start);
            cells.push_back(line.substr(start, comma - start));
            if (comma == std::string_view::npos) break;
            start = comma + 1;
        }
        if (cells.size() != 8) throw Error(Errc::MalformedRecord, "csv row " + std::to_string(row) + ": need 8 cells");

        TelemetrySample s;
        s.vehicle_id = vehicle_id;
        s.seq = parse_int<std::uint64_t>(cells[0], row);
        s.timestamp_ms = parse_int<std::int64_t>(cells[1], row);
        s.speed_kmh = parse_double(cells[2], row);
        s.maf_gs = parse_double(cells[3], row);
        if (!cells[4].empty()) s.fuel_l_per_km = parse_double(cells[4], row);
        s.cumulative_distance_km = parse_double(cells[5], row);
        if (!cells[6].empty() || !cells[7].empty()) {
            s.fix = nmea::GeoFix{parse_double(cells[6], row), parse_double(cells[7], row), {}, nmea::FixStatus::Valid};
        }
        out.push_back(std::move(s));
    }
    if (row == 0) throw Error(Errc::MalformedRecord, "csv export is empty");
    return out;
}

std::string samples_to_json(const std::vector<TelemetrySample>& samples)
{
    json arr = json::array();
    for (const auto& s : samples) arr.push_back(json::parse(to_wire(s)));
    return arr.dump();
}

std::vector<TelemetrySample> samples_from_json(std::string_view text)
{
    json arr;
    try {
        arr = json::parse(text);
    } catch (const json::exception& e) {
        throw Error(Errc::MalformedRecord, e.what());
    }
    if (!arr.is_array()) throw Error(Errc::MalformedRecord, "expected a JSON array");
    std::vector<TelemetrySample> out;
    for (const auto& item : arr) out.push_back(from_wire(item.dump()));
    return out;
}

std::string summary_to_json(const metrics::TripSummary& s)
{
    json j = {
        {"total_distance_km", s.total_distance_km},
        {"max_speed_kmh", s.max_speed_kmh},
        {"max_fuel_consumption_l_per_km",
         s.max_fuel_consumption_l_per_km ? json(*s.max_fuel_consumption_l_per_km) : json(nullptr)},
        {"duration_s", s.duration_s},
        {"sample_count", s.sample_count},
    };
    return j.dump();
}

} // namespace obdfleet::server
