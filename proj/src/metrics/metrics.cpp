#include "obdfleet/metrics/metrics.hpp"

#include "obdfleet/error.hpp"

#include <algorithm>
#include <string>

namespace obdfleet::metrics {

FuelConsumptionLPerKm fuel_consumption(double maf_gs, double speed_kmh, const FuelModel& model)
{
    if (speed_kmh == 0.0) return std::nullopt;
    return maf_gs * kSecondsPerHour / (model.afr * model.density_g_per_l * speed_kmh);
}

FuelConsumptionLPerKm fuel_consumption(codec::MafGramsPerSec maf, codec::SpeedKmh speed, const FuelModel& model)
{
    return fuel_consumption(maf.grams_per_sec(), speed.value, model);
}

double fuel_flow_l_per_h(double maf_gs, const FuelModel& model)
{
    return maf_gs * kSecondsPerHour / (model.afr * model.density_g_per_l);
}

FuelConsumptionLPerKm fuel_consumption_from_flow(double flow_l_per_h, double speed_kmh)
{
    if (speed_kmh == 0.0) return std::nullopt;
    return flow_l_per_h / speed_kmh;
}

double integrate_distance(double cumulative_km, double speed_kmh, double dt_s)
{
    if (!(dt_s > 0.0)) throw Error(Errc::NonPositiveDt, "dt must be positive, got " + std::to_string(dt_s));
    return cumulative_km + speed_kmh * dt_s / kSecondsPerHour;
}

TripSummary summarize_trip(std::span<const TelemetrySample> samples, double sample_period_s)
{
    if (samples.empty()) throw Error(Errc::EmptyTrip, "no samples in trip");
    if (!(sample_period_s > 0.0)) throw Error(Errc::NonPositiveDt, "sample period must be positive");

    TripSummary summary;
    const TelemetrySample* prev = nullptr;
    for (const auto& s : samples) {
        if (prev && s.timestamp_ms <= prev->timestamp_ms) {
            throw Error(Errc::NonMonotonicTimestamps,
                        "timestamp " + std::to_string(s.timestamp_ms) + " after " + std::to_string(prev->timestamp_ms));
        }
        summary.total_distance_km = integrate_distance(summary.total_distance_km, s.speed_kmh, sample_period_s);
        summary.max_speed_kmh = std::max(summary.max_speed_kmh, s.speed_kmh);
        if (s.fuel_l_per_km) {
            summary.max_fuel_consumption_l_per_km =
                std::max(summary.max_fuel_consumption_l_per_km.value_or(*s.fuel_l_per_km), *s.fuel_l_per_km);
        }
        prev = &s;
    }
    summary.sample_count = samples.size();
    summary.duration_s =
        static_cast<double>(samples.back().timestamp_ms - samples.front().timestamp_ms) / 1000.0 + sample_period_s;
    return summary;
}

} // namespace obdfleet::metrics
