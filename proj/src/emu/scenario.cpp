#include "obdfleet/emu/scenario.hpp"

#include "obdfleet/error.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string>

namespace obdfleet::emu {

namespace {

std::string_view trim(std::string_view s)
{
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

double parse_number(std::string_view field, std::size_t line_no, const char* what)
{
    field = trim(field);
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
    if (field.empty() || ec != std::errc{} || ptr != field.data() + field.size() || !std::isfinite(value)) {
        throw Error(Errc::ScenarioParse,
                    "line " + std::to_string(line_no) + ": bad " + what + " '" + std::string(field) + "'");
    }
    return value;
}

} // namespace

Scenario::Scenario(std::vector<ScenarioTick> ticks, LoopMode mode) : ticks_(std::move(ticks)), mode_(mode)
{
    if (ticks_.empty()) throw Error(Errc::ScenarioParse, "scenario needs at least one tick");
    if (ticks_.front().t < 0.0) throw Error(Errc::ScenarioParse, "tick times must be non-negative");
    for (std::size_t i = 1; i < ticks_.size(); ++i) {
        if (!(ticks_[i].t > ticks_[i - 1].t)) {
            throw Error(Errc::ScenarioParse, "tick times must strictly increase (tick " + std::to_string(i) + ")");
        }
    }
}

const ScenarioTick& sample_scenario(const Scenario& s, double t)
{
    const auto& ticks = s.ticks();
    if (s.loop_mode() == LoopMode::Loop && s.last_tick_time() > 0.0 && t > s.last_tick_time()) {
        t = std::fmod(t, s.last_tick_time());
    }
    auto it = std::upper_bound(ticks.begin(), ticks.end(), t,
                               [](double value, const ScenarioTick& tick) { return value < tick.t; });
    return it == ticks.begin() ? ticks.front() : *std::prev(it);
}

Scenario parse_scenario(std::string_view text, LoopMode mode)
{
    std::vector<ScenarioTick> ticks;
    std::size_t line_no = 0;
    while (!text.empty()) {
        const auto nl = text.find('\n');
        auto line = trim(text.substr(0, nl));
        text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
        ++line_no;
        if (line.empty() || line.front() == '#') continue;

        // t,speed,maf[,gll]; the GLL sentence carries its own commas.
        std::string_view fields[3];
        std::string_view rest = line;
        for (int i = 0; i < 3; ++i) {
            const auto comma = rest.find(',');
            if (comma == std::string_view::npos && i < 2) {
                throw Error(Errc::ScenarioParse, "line " + std::to_string(line_no) + ": expected t,speed,maf");
            }
            fields[i] = rest.substr(0, comma);
            rest = comma == std::string_view::npos ? std::string_view{} : rest.substr(comma + 1);
        }

        ScenarioTick tick;
        tick.t = parse_number(fields[0], line_no, "time");
        const double speed = parse_number(fields[1], line_no, "speed");
        if (speed < 0 || speed > 255 || speed != std::floor(speed)) {
            throw Error(Errc::ScenarioParse, "line " + std::to_string(line_no) + ": speed must be an integer 0..255");
        }
        tick.speed = codec::SpeedKmh{static_cast<std::uint8_t>(speed)};
        const double maf = parse_number(fields[2], line_no, "maf");
        try {
            tick.maf = codec::MafGramsPerSec::from_grams_per_sec(maf);
        } catch (const Error& e) {
            throw Error(Errc::ScenarioParse, "line " + std::to_string(line_no) + ": " + e.what());
        }
        rest = trim(rest);
        if (!rest.empty()) {
            try {
                tick.gll = nmea::parse_gll(rest);
            } catch (const Error& e) {
                throw Error(Errc::ScenarioParse, "line " + std::to_string(line_no) + ": " + e.what());
            }
        }
        if (!ticks.empty() && !(tick.t > ticks.back().t)) {
            throw Error(Errc::ScenarioParse, "line " + std::to_string(line_no) + ": time must strictly increase");
        }
        if (tick.t < 0) throw Error(Errc::ScenarioParse, "line " + std::to_string(line_no) + ": negative time");
        ticks.push_back(std::move(tick));
    }
    if (ticks.empty()) throw Error(Errc::EmptyTrip, "scenario contains no ticks");
    return Scenario(std::move(ticks), mode);
}

Scenario load_scenario(const std::filesystem::path& path, LoopMode mode)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(Errc::ScenarioParse, "cannot open scenario file " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_scenario(buf.str(), mode);
}

} // namespace obdfleet::emu
