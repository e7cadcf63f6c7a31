#pragma once

// ELM327 v1.4b interpreter emulation in front of a scripted ECU.
//
// Reply framing: [<command>\r] <body> \r\r>
// The echoed command is present when echo was enabled at the time the
// command arrived.

#include "obdfleet/emu/scenario.hpp"

#include <functional>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace obdfleet::emu {

inline constexpr std::string_view kElmVersion = "ELM327 v1.4b";
inline constexpr char kPrompt = '>';
inline constexpr unsigned kElmBaudRate = 38400; // serial metadata only

enum class Protocol { Auto, Iso9141, Iso14230, Can11, Can29 };

std::string_view to_string(Protocol p) noexcept;
/// "auto", "iso9141", "iso14230", "can11", "can29"; throws std::invalid_argument.
Protocol parse_protocol(std::string_view name);

struct EmulatorState {
    bool echo_enabled = true;
    bool spaces_enabled = true;
    Protocol protocol = Protocol::Auto;
    bool protocol_locked = false;
    double scenario_clock = 0.0; // driven by the owner, survives ATZ

    friend bool operator==(const EmulatorState&, const EmulatorState&) = default;
};

struct Exchange {
    EmulatorState state;
    std::string reply;
};

/// Pure command step. `line` may carry its trailing CR. `vehicle_protocol`
/// is what a 0100 protocol search settles on (Auto settles on Can11).
Exchange handle_line(EmulatorState state, std::string_view line, const Scenario& scenario,
                     Protocol vehicle_protocol);

/// One connection's worth of emulator: state, byte reassembly and a log of
/// the normalised commands it received.
class Elm327Session {
public:
    using Clock = std::function<double()>;

    Elm327Session(std::shared_ptr<const Scenario> scenario, Protocol vehicle_protocol, Clock clock);

    /// Consumes raw bytes; returns the concatenated replies to every line
    /// completed by a CR. LF is ignored.
    std::string feed(std::string_view bytes);

    const EmulatorState& state() const noexcept { return state_; }
    const std::vector<std::string>& command_log() const noexcept { return log_; }

private:
    std::shared_ptr<const Scenario> scenario_;
    Protocol vehicle_protocol_;
    Clock clock_;
    EmulatorState state_;
    std::string pending_;
    std::vector<std::string> log_;
};

} // namespace obdfleet::emu
