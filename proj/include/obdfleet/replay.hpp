#pragma once

// Deterministic end-to-end run of one scenario: emulator, agent and server
// wired in-process and driven by a virtual clock, one poll per period.

#include "obdfleet/emu/elm327.hpp"
#include "obdfleet/metrics/metrics.hpp"
#include "obdfleet/server/store.hpp"

#include <functional>
#include <string>
#include <vector>

namespace obdfleet {

struct ReplayConfig {
    metrics::FuelModel fuel_model = metrics::FuelModel::petrol();
    double period_s = 1.0;
    emu::Protocol protocol = emu::Protocol::Auto;
    std::string vehicle_id = "replay";
    std::int64_t start_ms = 0; // agent timestamp of scenario time 0
    std::size_t buffer_capacity = 3600;
    /// Uplink availability during cycle i; empty means always up. The link
    /// is always up for the final drain.
    std::function<bool(std::size_t cycle)> link_up;
    /// Destination store; a private MemoryStore when null.
    server::SampleStore* store = nullptr;
};

struct ReplayResult {
    metrics::TripSummary server_summary;
    metrics::TripSummary agent_summary; // over the agent's own emitted samples
    std::vector<TelemetrySample> agent_samples;
    std::vector<TelemetrySample> server_samples;
    std::vector<std::string> handshake_commands;
    std::vector<std::string> handshake_replies;
    std::size_t cycles = 0;
    std::uint64_t skipped = 0;
    std::uint64_t dropped = 0;
    std::uint64_t rejected = 0;
};

/// Number of poll cycles needed to cover the scenario at `period_s`.
std::size_t replay_cycle_count(const emu::Scenario& scenario, double period_s);

/// Throws Error(UnknownVehicle) when nothing reached the server, and whatever
/// the agent handshake throws.
ReplayResult replay(const emu::Scenario& scenario, const ReplayConfig& config);

} // namespace obdfleet
