#pragma once

#include "obdfleet/metrics/metrics.hpp"
#include "obdfleet/server/store.hpp"

#include <atomic>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace obdfleet::server {

/// Turns wire records into stored samples. The reply is produced only after
/// the store has made the sample durable.
class Ingestor {
public:
    using Clock = std::function<std::int64_t()>; // server UTC ms

    Ingestor(SampleStore& store, Clock clock) : store_(&store), clock_(std::move(clock)) {}

    /// "ACK <seq>" for a stored or duplicate record, "NAK" for a malformed
    /// one. Error(StorageFailure) propagates: no reply may be sent.
    std::string ingest(std::string_view line);

    std::uint64_t duplicates() const noexcept { return duplicates_; }

private:
    SampleStore* store_;
    Clock clock_;
    std::atomic<std::uint64_t> duplicates_{0};
};

struct PositionReport {
    nmea::GeoFix fix;
    std::int64_t timestamp_ms = 0;
    std::uint64_t seq = 0;
};

/// Read-side API over a store. Trip arithmetic is delegated to metrics.
class FleetQueries {
public:
    explicit FleetQueries(const SampleStore& store, double sample_period_s = 1.0)
        : store_(&store), period_s_(sample_period_s)
    {
    }

    std::vector<VehicleRecord> vehicles() const { return store_->vehicles(); }

    /// Throws InvalidRange (t0 > t1) or UnknownVehicle.
    std::vector<TelemetrySample> query_samples(const std::string& vehicle_id, std::int64_t t0, std::int64_t t1) const;

    /// Throws as query_samples, plus EmptyTrip.
    metrics::TripSummary trip_summary(const std::string& vehicle_id, std::int64_t t0, std::int64_t t1,
                                      std::optional<double> sample_period_s = std::nullopt) const;

    /// Throws UnknownVehicle or NoFixAvailable.
    PositionReport latest_position(const std::string& vehicle_id) const;

    std::string export_csv(const std::string& vehicle_id, std::int64_t t0, std::int64_t t1) const;
    std::string export_json(const std::string& vehicle_id, std::int64_t t0, std::int64_t t1) const;

    double sample_period_s() const noexcept { return period_s_; }

private:
    const SampleStore* store_;
    double period_s_;
};

inline constexpr std::string_view kCsvHeader =
    "seq,timestamp,speed_kmh,maf_gs,fuel_l_per_km,cumulative_distance_km,lat,lon";

std::string samples_to_csv(const std::vector<TelemetrySample>& samples);
/// Inverse of samples_to_csv for the exported columns. Rows with lat/lon
/// come back with a valid fix at UTC 00:00:00. Throws MalformedRecord.
std::vector<TelemetrySample> samples_from_csv(std::string_view csv, const std::string& vehicle_id);

std::string samples_to_json(const std::vector<TelemetrySample>& samples);
std::vector<TelemetrySample> samples_from_json(std::string_view json);

std::string summary_to_json(const metrics::TripSummary& summary);

} // namespace obdfleet::server
