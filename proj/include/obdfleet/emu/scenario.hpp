#pragma once

// Scripted ECU time series. File format, one tick per line:
//
//   # comment
//   t,speed_kmh,maf_gs[,$GPGLL,...*HH]
//
// t in seconds (strictly increasing), speed 0..255, maf 0..655.35.

#include "obdfleet/codec/obd.hpp"
#include "obdfleet/nmea/gll.hpp"

#include <filesystem>
#include <optional>
#include <string_view>
#include <vector>

namespace obdfleet::emu {

enum class LoopMode { Hold, Loop };

struct ScenarioTick {
    double t = 0.0;
    codec::SpeedKmh speed;
    codec::MafGramsPerSec maf;
    std::optional<nmea::GeoFix> gll;

    friend bool operator==(const ScenarioTick&, const ScenarioTick&) = default;
};

class Scenario {
public:
    /// Throws Errc::ScenarioParse unless there is at least one tick, the
    /// first t is >= 0 and t strictly increases.
    explicit Scenario(std::vector<ScenarioTick> ticks, LoopMode mode = LoopMode::Hold);

    const std::vector<ScenarioTick>& ticks() const noexcept { return ticks_; }
    LoopMode loop_mode() const noexcept { return mode_; }
    double last_tick_time() const noexcept { return ticks_.back().t; }

private:
    std::vector<ScenarioTick> ticks_;
    LoopMode mode_;
};

/// Step-hold lookup: the latest tick with tick.t <= t (the first tick before
/// it starts). Loop mode wraps t modulo the last tick time.
const ScenarioTick& sample_scenario(const Scenario& s, double t);

/// Errors carry the 1-based line number. A text without any tick throws
/// Errc::EmptyTrip.
Scenario parse_scenario(std::string_view text, LoopMode mode = LoopMode::Hold);
Scenario load_scenario(const std::filesystem::path& path, LoopMode mode = LoopMode::Hold);

} // namespace obdfleet::emu
