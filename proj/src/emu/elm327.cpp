#include "obdfleet/emu/elm327.hpp"

#include "obdfleet/error.hpp"

#include <array>
#include <cctype>
#include <stdexcept>

namespace obdfleet::emu {

namespace {

constexpr std::string_view kOk = "OK";
constexpr std::string_view kNoData = "NO DATA";
constexpr std::string_view kUnknown = "?";

// PIDs 01-20 bitmap: only 0D and 10 are advertised.
constexpr std::array<std::uint8_t, 4> supported_pid_bitmap()
{
    std::array<std::uint8_t, 4> bits{};
    for (unsigned pid : {0x0Du, 0x10u}) {
        const unsigned index = pid - 1; // bit 0 (MSB of byte A) is PID 01
        bits[index / 8] |= static_cast<std::uint8_t>(0x80u >> (index % 8));
    }
    return bits;
}

std::string normalise(std::string_view line)
{
    std::string cmd;
    for (char c : line) {
        if (c == '\r' || c == '\n' || c == ' ' || c == '\t') continue;
        cmd.push_back(static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
    }
    return cmd;
}

bool is_hex(std::string_view s)
{
    for (char c : s) {
        if (!std::isxdigit(static_cast<unsigned char>(c))) return false;
    }
    return true;
}

std::string response_text(const codec::ObdResponse& resp, bool spaces)
{
    std::vector<std::uint8_t> all{resp.mode_echo, resp.pid_echo};
    all.insert(all.end(), resp.data.begin(), resp.data.end());
    return codec::format_hex(all, spaces);
}

std::string obd_reply(EmulatorState& state, std::string_view cmd, const Scenario& scenario,
                      Protocol vehicle_protocol)
{
    if (cmd.size() != 4 || !is_hex(cmd)) return std::string(kUnknown);
    const auto bytes = codec::parse_hex_bytes(cmd);
    if (bytes[0] != codec::kCurrentDataMode) return std::string(kNoData);
    const codec::ObdRequest req(bytes[0], bytes[1]);

    if (req.pid() == codec::Pid::SupportedPids) {
        state.protocol = vehicle_protocol == Protocol::Auto ? Protocol::Can11 : vehicle_protocol;
        state.protocol_locked = true;
        return response_text(codec::make_response(req, supported_pid_bitmap()), state.spaces_enabled);
    }
    if (!state.protocol_locked) return std::string(kNoData);

    const auto& tick = sample_scenario(scenario, state.scenario_clock);
    std::vector<std::uint8_t> data;
    switch (req.pid()) {
    case codec::Pid::Speed:
        data = {tick.speed.value};
        break;
    case codec::Pid::Maf:
        data = {static_cast<std::uint8_t>(tick.maf.hundredths() >> 8),
                static_cast<std::uint8_t>(tick.maf.hundredths() & 0xFF)};
        break;
    default:
        return std::string(kNoData); // includes FuelFlow (5E)
    }
    return response_text(codec::make_response(req, data), state.spaces_enabled);
}

} // namespace

std::string_view to_string(Protocol p) noexcept
{
    switch (p) {
    case Protocol::Auto: return "auto";
    case Protocol::Iso9141: return "iso9141";
    case Protocol::Iso14230: return "iso14230";
    case Protocol::Can11: return "can11";
    case Protocol::Can29: return "can29";
    }
    return "auto";
}

Protocol parse_protocol(std::string_view name)
{
    for (auto p : {Protocol::Auto, Protocol::Iso9141, Protocol::Iso14230, Protocol::Can11, Protocol::Can29}) {
        if (to_string(p) == name) return p;
    }
    throw std::invalid_argument("unknown protocol '" + std::string(name) + "'");
}

Exchange handle_line(EmulatorState state, std::string_view line, const Scenario& scenario,
                     Protocol vehicle_protocol)
{
    while (!line.empty() && (line.back() == '\r' || line.back() == '\n')) line.remove_suffix(1);

    std::string reply;
    if (state.echo_enabled) {
        reply.append(line);
        reply.push_back('\r');
    }

    const auto cmd = normalise(line);
    std::string body;
    if (cmd == "ATZ") {
        const double clock = state.scenario_clock;
        state = EmulatorState{};
        state.scenario_clock = clock;
        body = kElmVersion;
    } else if (cmd == "ATI") {
        body = kElmVersion;
    } else if (cmd == "ATSP0") {
        state.protocol = Protocol::Auto;
        state.protocol_locked = false;
        body = kOk;
    } else if (cmd == "ATE0" || cmd == "ATE1") {
        state.echo_enabled = cmd.back() == '1';
        body = kOk;
    } else if (cmd == "ATS0" || cmd == "ATS1") {
        state.spaces_enabled = cmd.back() == '1';
        body = kOk;
    } else if (cmd == "ATFE") {
        body = kOk;
    } else if (cmd.starts_with("AT")) {
        body = kUnknown;
    } else {
        body = obd_reply(state, cmd, scenario, vehicle_protocol);
    }

    reply += body;
    reply += "\r\r";
    reply.push_back(kPrompt);
    return {state, std::move(reply)};
}

Elm327Session::Elm327Session(std::shared_ptr<const Scenario> scenario, Protocol vehicle_protocol, Clock clock)
    : scenario_(std::move(scenario)), vehicle_protocol_(vehicle_protocol), clock_(std::move(clock))
{
}

std::string Elm327Session::feed(std::string_view bytes)
{
    std::string out;
    for (char c : bytes) {
        if (c == '\n') continue;
        if (c != '\r') {
            pending_.push_back(c);
            continue;
        }
        state_.scenario_clock = clock_ ? clock_() : 0.0;
        log_.push_back(normalise(pending_));
        auto [next, reply] = handle_line(state_, pending_, *scenario_, vehicle_protocol_);
        state_ = next;
        out += reply;
        pending_.clear();
    }
    return out;
}

} // namespace obdfleet::emu
