#pragma once

// Fuel consumption, distance integration and trip aggregation.
// Units are fixed: km, km/h, g/s, L/h, L/km, seconds.

#include "obdfleet/codec/obd.hpp"
#include "obdfleet/telemetry.hpp"

#include <cstddef>
#include <optional>
#include <span>

namespace obdfleet::metrics {

enum class FuelKind { Petrol, Diesel };

struct FuelModel {
    double afr;             // mass air : mass fuel
    double density_g_per_l; // fuel density
    FuelKind kind;

    static constexpr FuelModel petrol() { return {14.7, 820.0, FuelKind::Petrol}; }
    static constexpr FuelModel diesel() { return {14.5, 750.0, FuelKind::Diesel}; }
    static constexpr FuelModel of(FuelKind kind) { return kind == FuelKind::Petrol ? petrol() : diesel(); }
};

/// Litres per kilometre; empty (undefined) exactly when speed is zero.
using FuelConsumptionLPerKm = std::optional<double>;

inline constexpr double kSecondsPerHour = 3600.0;

/// maf * 3600 / (afr * density * speed).
FuelConsumptionLPerKm fuel_consumption(double maf_gs, double speed_kmh, const FuelModel& model);
FuelConsumptionLPerKm fuel_consumption(codec::MafGramsPerSec maf, codec::SpeedKmh speed, const FuelModel& model);

/// Litres per hour of fuel implied by an air mass flow.
double fuel_flow_l_per_h(double maf_gs, const FuelModel& model);

/// flow / speed.
FuelConsumptionLPerKm fuel_consumption_from_flow(double flow_l_per_h, double speed_kmh);

/// cumulative + speed * dt / 3600. Throws Errc::NonPositiveDt when dt <= 0.
double integrate_distance(double cumulative_km, double speed_kmh, double dt_s);

struct TripSummary {
    double total_distance_km = 0.0;
    double max_speed_kmh = 0.0;
    std::optional<double> max_fuel_consumption_l_per_km; // empty if never moving
    double duration_s = 0.0;
    std::size_t sample_count = 0;

    friend bool operator==(const TripSummary&, const TripSummary&) = default;
};

/// Folds a seq-ordered sample list. Each sample stands for one sampling
/// period, so its distance increment is speed * sample_period_s, which is the
/// same rule the agent uses for cumulative_distance_km. duration_s spans the
/// first timestamp to the end of the last sample's period.
///
/// Throws EmptyTrip, NonMonotonicTimestamps, NonPositiveDt.
TripSummary summarize_trip(std::span<const TelemetrySample> samples, double sample_period_s = 1.0);

} // namespace obdfleet::metrics
