#include "obdfleet/replay.hpp"

#include "obdfleet/agent/agent.hpp"
#include "obdfleet/agent/uplink.hpp"
#include "obdfleet/emu/server.hpp"
#include "obdfleet/error.hpp"
#include "obdfleet/net/fault.hpp"
#include "obdfleet/server/protocol.hpp"

#include <cmath>
#include <stdexcept>

namespace obdfleet {

namespace {

// Keeps i*period from landing a hair before a tick boundary.
constexpr double kTickEpsilon = 1e-9;

class ScenarioGps final : public agent::GpsSource {
public:
    ScenarioGps(const emu::Scenario& scenario, const double& now) : scenario_(&scenario), now_(&now) {}

    std::optional<std::string> latest_sentence() override
    {
        const auto& tick = emu::sample_scenario(*scenario_, *now_);
        if (!tick.gll) return std::nullopt;
        return nmea::render_gll(*tick.gll);
    }

private:
    const emu::Scenario* scenario_;
    const double* now_;
};

} // namespace

std::size_t replay_cycle_count(const emu::Scenario& scenario, double period_s)
{
    if (!(period_s > 0.0)) throw std::invalid_argument("period must be positive");
    return static_cast<std::size_t>(std::floor(scenario.last_tick_time() / period_s + kTickEpsilon)) + 1;
}

ReplayResult replay(const emu::Scenario& scenario, const ReplayConfig& config)
{
    double now = 0.0;
    const auto shared = std::make_shared<const emu::Scenario>(scenario);
    emu::Elm327Session session(shared, config.protocol, [&now] { return now; });
    emu::LoopbackElmStream obd(session);
    ScenarioGps gps(scenario, now);

    server::MemoryStore private_store;
    server::SampleStore& store = config.store ? *config.store : private_store;
    std::int64_t server_ms = config.start_ms;
    server::LineProtocol protocol(store, [&server_ms] { return server_ms; }, config.period_s);
    server::LoopbackConnector loopback(protocol);
    net::FaultyConnector link(loopback);

    agent::AgentConfig agent_config;
    agent_config.poll_period_s = config.period_s;
    agent_config.fuel_model = config.fuel_model;
    agent_config.buffer_capacity = config.buffer_capacity;
    agent_config.server_address = "loopback";
    agent::Agent agent(agent_config, config.vehicle_id, obd,
                       [&] { return config.start_ms + std::llround(now * 1000.0); }, &gps);
    agent::Uplink uplink(link, config.buffer_capacity, agent_config.ack_timeout);

    ReplayResult result;
    agent.initialize();
    result.handshake_commands = agent.client().sent();
    result.handshake_replies = agent.client().transcript();

    result.cycles = replay_cycle_count(scenario, config.period_s);
    for (std::size_t i = 0; i < result.cycles; ++i) {
        now = static_cast<double>(i) * config.period_s + kTickEpsilon;
        server_ms = config.start_ms + std::llround(now * 1000.0);
        // The link state holds for the whole cycle; a restored link drains the
        // backlog before the new sample is queued.
        link.set_link_up(!config.link_up || config.link_up(i));
        uplink.flush();
        try {
            auto sample = agent.poll_cycle();
            result.agent_samples.push_back(sample);
            uplink.enqueue(std::move(sample));
        } catch (const Error& e) {
            if (e.code() != Errc::PidReadError) throw;
        }
        uplink.flush();
    }
    link.set_link_up(true);
    uplink.flush();

    result.skipped = agent.skipped_cycles();
    result.dropped = uplink.dropped();
    result.rejected = uplink.rejected();

    const server::FleetQueries queries(store, config.period_s);
    result.server_samples = queries.query_samples(config.vehicle_id, server::kTimeMin, server::kTimeMax);
    result.server_summary = queries.trip_summary(config.vehicle_id, server::kTimeMin, server::kTimeMax);
    result.agent_summary = metrics::summarize_trip(result.agent_samples, config.period_s);
    return result;
}

} // namespace obdfleet
