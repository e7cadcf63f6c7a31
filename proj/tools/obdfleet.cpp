#include "obdfleet/agent/agent.hpp"
#include "obdfleet/agent/uplink.hpp"
#include "obdfleet/codec/obd.hpp"
#include "obdfleet/emu/server.hpp"
#include "obdfleet/error.hpp"
#include "obdfleet/net/serial.hpp"
#include "obdfleet/net/tcp.hpp"
#include "obdfleet/replay.hpp"
#include "obdfleet/server/fleet.hpp"
#include "obdfleet/server/http.hpp"
#include "obdfleet/server/protocol.hpp"

#include <CLI11.hpp>

#include <atomic>
#include <csignal>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <mutex>
#include <thread>

using namespace obdfleet;
using namespace std::chrono_literals;

namespace {

std::atomic<bool> g_stop{false};

void on_signal(int)
{
    g_stop = true;
}

void install_signal_handlers()
{
    std::signal(SIGINT, on_signal);
    std::signal(SIGTERM, on_signal);
    std::signal(SIGPIPE, SIG_IGN);
}

void wait_for_signal()
{
    while (!g_stop) std::this_thread::sleep_for(100ms);
}

std::int64_t wall_clock_ms()
{
    return std::chrono::duration_cast<std::chrono::milliseconds>(
               std::chrono::system_clock::now().time_since_epoch())
        .count();
}

metrics::FuelModel fuel_model(const std::string& name)
{
    if (name == "petrol") return metrics::FuelModel::petrol();
    if (name == "diesel") return metrics::FuelModel::diesel();
    throw std::invalid_argument("unknown fuel '" + name + "' (petrol|diesel)");
}

std::string escape(std::string_view raw)
{
    std::string out;
    for (char c : raw) {
        if (c == '\r') out += "\\r";
        else if (c == '\n') out += "\\n";
        else out += c;
    }
    return out;
}

void print_summary(const metrics::TripSummary& s)
{
    std::cout << std::setprecision(10) << "samples             " << s.sample_count << '\n'
              << "distance_km         " << s.total_distance_km << '\n'
              << "max_speed_kmh       " << s.max_speed_kmh << '\n'
              << "max_fuel_l_per_km   ";
    if (s.max_fuel_consumption_l_per_km) std::cout << *s.max_fuel_consumption_l_per_km << '\n';
    else std::cout << "undefined\n";
    std::cout << "duration_s          " << s.duration_s << '\n';
}

// ---- decode ----

int run_decode(const std::vector<std::string>& args)
{
    if (args.size() < 2) throw std::invalid_argument("usage: decode <mode> <pid> [data bytes...]");
    const auto head = codec::parse_hex_bytes(args[0] + " " + args[1]);
    const codec::ObdRequest req(head[0], static_cast<codec::Pid>(head[1]));

    std::string reply;
    for (std::size_t i = 2; i < args.size(); ++i) reply += args[i] + " ";
    const std::uint8_t echo[] = {static_cast<std::uint8_t>(head[0] + codec::kPositiveResponseOffset), head[1]};
    const auto resp = codec::parse_response(codec::format_hex(echo, true) + " " + reply, req);

    switch (req.pid()) {
    case codec::Pid::Speed: {
        const unsigned speed = codec::decode_speed(resp).value;
        std::cout << "speed = " << speed << " km/h\n";
        break;
    }
    case codec::Pid::Maf: {
        const auto maf = codec::decode_maf(resp);
        std::cout << "maf = " << maf.hundredths() / 100 << '.' << std::setw(2) << std::setfill('0')
                  << maf.hundredths() % 100 << " g/s\n";
        break;
    }
    default:
        std::cout << "pid " << codec::format_hex(std::span(&head[1], 1), false)
                  << " data = " << codec::format_hex(resp.data, true) << '\n';
    }
    return 0;
}

// ---- emu ----

struct EmuOptions {
    std::string scenario;
    std::string protocol = "auto";
    std::string listen = "127.0.0.1:35000";
    std::string gps_listen;
    double time_scale = 1.0;
    bool loop = false;
};

int run_emu(const EmuOptions& o)
{
    auto scenario = std::make_shared<const emu::Scenario>(
        emu::load_scenario(o.scenario, o.loop ? emu::LoopMode::Loop : emu::LoopMode::Hold));
    auto clock = std::make_shared<const emu::ScenarioClock>(o.time_scale);
    const auto protocol = emu::parse_protocol(o.protocol);
    std::unique_ptr<emu::GpsFeedServer> gps;
    if (!o.gps_listen.empty()) gps = std::make_unique<emu::GpsFeedServer>(net::Endpoint::parse(o.gps_listen), scenario, clock);

    std::unique_ptr<emu::Elm327Server> tcp;
    std::unique_ptr<emu::Elm327PtyServer> pty;
    if (net::is_device_path(o.listen)) {
        pty = std::make_unique<emu::Elm327PtyServer>(o.listen, scenario, protocol, clock);
        pty->start();
        std::cerr << "elm327 emulator on " << pty->path().string() << '\n';
    } else {
        tcp = std::make_unique<emu::Elm327Server>(net::Endpoint::parse(o.listen), scenario, protocol, clock);
        tcp->start();
        std::cerr << "elm327 emulator on port " << tcp->port() << '\n';
    }
    if (gps) {
        gps->start();
        std::cerr << "gps feed on port " << gps->port() << '\n';
    }
    wait_for_signal();
    return 0;
}

// ---- agent ----

/// host:port opens TCP; anything with a '/' is a serial device.
std::unique_ptr<net::ByteStream> open_obd(const std::string& address, std::chrono::milliseconds timeout)
{
    if (net::is_device_path(address)) return net::SerialStream::open(address);
    return net::TcpStream::connect(net::Endpoint::parse(address), timeout);
}

struct AgentOptions {
    std::string obd;
    std::string server;
    std::string vehicle_id;
    std::string gps;
    std::string fuel = "petrol";
    double period = 1.0;
    std::size_t cycles = 0;
    std::size_t buffer = 3600;
};

/// Keeps the most recent line from a GPS feed connection.
class GpsFeedReader final : public agent::GpsSource {
public:
    explicit GpsFeedReader(net::Endpoint ep) : ep_(std::move(ep))
    {
        thread_ = std::thread([this] { loop(); });
    }

    ~GpsFeedReader() override
    {
        running_ = false;
        thread_.join();
    }

    std::optional<std::string> latest_sentence() override
    {
        std::lock_guard lock(mutex_);
        return latest_;
    }

private:
    void loop()
    {
        while (running_) {
            try {
                auto conn = net::TcpStream::connect(ep_, 1000ms);
                net::LineReader reader(*conn);
                while (running_) {
                    if (auto line = reader.read_line(200ms)) {
                        std::lock_guard lock(mutex_);
                        latest_ = std::move(*line);
                    }
                }
            } catch (const Error&) {
                std::lock_guard lock(mutex_);
                latest_.reset();
            }
            if (running_) std::this_thread::sleep_for(500ms);
        }
    }

    net::Endpoint ep_;
    std::atomic<bool> running_{true};
    std::thread thread_;
    std::mutex mutex_;
    std::optional<std::string> latest_;
};

int run_agent(const AgentOptions& o)
{
    agent::AgentConfig config;
    config.poll_period_s = o.period;
    config.fuel_model = fuel_model(o.fuel);
    config.server_address = o.server;
    config.buffer_capacity = o.buffer;
    config.validate();

    net::TcpConnector server(net::Endpoint::parse(o.server), 2000ms);
    try {
        if (auto last = agent::query_last_seq(server, o.vehicle_id, config.ack_timeout)) config.first_seq = *last + 1;
    } catch (const Error& e) {
        std::cerr << "warning: server unreachable, starting at seq 1: " << e.what() << '\n';
    }

    auto obd = open_obd(o.obd, 2000ms);
    std::unique_ptr<GpsFeedReader> gps;
    if (!o.gps.empty()) gps = std::make_unique<GpsFeedReader>(net::Endpoint::parse(o.gps));

    agent::Agent agent(config, o.vehicle_id, *obd, wall_clock_ms, gps.get());
    const auto& negotiated = agent.initialize();
    std::cerr << "connected: " << negotiated.version << ", first seq " << config.first_seq << '\n';

    agent::Uplink uplink(server, config.buffer_capacity, config.ack_timeout);
    std::atomic<bool> polling{true};
    std::thread uplink_thread([&] {
        while (polling) {
            uplink.flush();
            std::this_thread::sleep_for(uplink.buffered() > 0 ? 200ms : 20ms);
        }
        // Bounded drain once polling has stopped.
        const auto deadline = std::chrono::steady_clock::now() + 5s;
        while (uplink.buffered() > 0 && std::chrono::steady_clock::now() < deadline) {
            if (uplink.flush() == 0) std::this_thread::sleep_for(200ms);
        }
    });

    const auto period = std::chrono::duration_cast<std::chrono::steady_clock::duration>(
        std::chrono::duration<double>(o.period));
    auto next = std::chrono::steady_clock::now();
    for (std::size_t i = 0; !g_stop && (o.cycles == 0 || i < o.cycles); ++i) {
        try {
            uplink.enqueue(agent.poll_cycle());
        } catch (const Error& e) {
            if (e.code() != Errc::PidReadError) throw;
            std::cerr << "cycle skipped: " << e.what() << '\n';
        }
        next += period;
        std::this_thread::sleep_until(next);
    }
    polling = false;
    uplink_thread.join();

    std::cerr << "acked " << uplink.acked() << ", buffered " << uplink.buffered() << ", dropped " << uplink.dropped()
              << ", skipped " << agent.skipped_cycles() << ", distance " << agent.cumulative_distance_km() << " km\n";
    return uplink.buffered() == 0 ? 0 : 1;
}

// ---- server ----

struct ServerOptions {
    std::string listen = "127.0.0.1:5555";
    std::string http = "127.0.0.1:8080";
    std::string data_dir = "fleet-data";
    double period = 1.0;
};

int run_server(const ServerOptions& o)
{
    if (!(o.period > 0.0)) throw std::invalid_argument("period must be positive");
    server::LogStore store(o.data_dir);
    server::LineProtocol protocol(store, wall_clock_ms, o.period);
    server::IngestServer ingest(net::Endpoint::parse(o.listen), protocol);
    server::HttpApi http(protocol.queries(), net::Endpoint::parse(o.http));
    ingest.start();
    http.start();
    std::cerr << "ingest on port " << ingest.port() << ", http on port " << http.port() << ", " << store.size()
              << " samples loaded from " << o.data_dir << '\n';
    wait_for_signal();
    http.stop();
    ingest.stop();
    return 0;
}

// ---- handshake ----

int run_handshake(const std::string& obd_address, int timeout_ms)
{
    auto obd = open_obd(obd_address, std::chrono::milliseconds(timeout_ms));
    agent::AgentConfig config;
    config.handshake_timeout = std::chrono::milliseconds(timeout_ms);
    agent::Agent agent(config, "handshake", *obd, wall_clock_ms);
    int status = 0;
    try {
        agent.initialize();
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        status = 1;
    }
    const auto& sent = agent.client().sent();
    const auto& replies = agent.client().transcript();
    for (std::size_t i = 0; i < sent.size(); ++i) {
        std::cout << "> " << sent[i] << '\n';
        if (i < replies.size()) std::cout << "< " << escape(replies[i]) << '\n';
    }
    return status;
}

// ---- replay ----

struct ReplayOptions {
    std::string scenario;
    std::string fuel = "petrol";
    std::string csv;
    std::string protocol = "auto";
    std::string vehicle_id = "replay";
    double period = 1.0;
};

int run_replay(const ReplayOptions& o)
{
    ReplayConfig config;
    config.fuel_model = fuel_model(o.fuel);
    config.period_s = o.period;
    config.protocol = emu::parse_protocol(o.protocol);
    config.vehicle_id = o.vehicle_id;
    const auto result = replay(emu::load_scenario(o.scenario), config);
    print_summary(result.server_summary);
    if (!o.csv.empty()) {
        std::ofstream out(o.csv, std::ios::binary);
        out << server::samples_to_csv(result.server_samples);
        if (!out) throw std::runtime_error("cannot write " + o.csv);
    }
    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"OBD-II telemetry toolkit: ELM327 emulator, vehicle agent and fleet server"};
    app.require_subcommand(1);

    std::vector<std::string> decode_args;
    auto* decode = app.add_subcommand("decode", "Decode one mode/PID response, e.g. decode 01 0D 32");
    decode->add_option("bytes", decode_args, "mode, pid and data bytes in hex")->required();

    EmuOptions emu_opts;
    auto* emu_cmd = app.add_subcommand("emu", "Run the ELM327 emulator");
    emu_cmd->add_option("--scenario", emu_opts.scenario, "scenario file")->required()->check(CLI::ExistingFile);
    emu_cmd->add_option("--protocol", emu_opts.protocol, "auto|can11|can29|iso9141|iso14230")->capture_default_str();
    emu_cmd->add_option("--listen", emu_opts.listen, "host:port, or a path at which to publish a pseudo-terminal")->capture_default_str();
    emu_cmd->add_option("--gps-listen", emu_opts.gps_listen, "host:port for an NMEA GLL feed");
    emu_cmd->add_option("--time-scale", emu_opts.time_scale, "scenario seconds per wall second")->capture_default_str();
    emu_cmd->add_flag("--loop", emu_opts.loop, "wrap around at the end of the scenario");

    AgentOptions agent_opts;
    auto* agent_cmd = app.add_subcommand("agent", "Run the vehicle agent");
    agent_cmd->add_option("--obd", agent_opts.obd, "adapter host:port or serial device path")->required();
    agent_cmd->add_option("--server", agent_opts.server, "fleet server host:port")->required();
    agent_cmd->add_option("--vehicle-id", agent_opts.vehicle_id, "vehicle identifier")->required();
    agent_cmd->add_option("--period", agent_opts.period, "poll period in seconds")->capture_default_str();
    agent_cmd->add_option("--fuel", agent_opts.fuel, "petrol|diesel")->capture_default_str();
    agent_cmd->add_option("--gps", agent_opts.gps, "GPS feed host:port");
    agent_cmd->add_option("--cycles", agent_opts.cycles, "stop after N polls (0 runs until signalled)");
    agent_cmd->add_option("--buffer", agent_opts.buffer, "uplink buffer capacity")->capture_default_str();

    ServerOptions server_opts;
    auto* server_cmd = app.add_subcommand("server", "Run the fleet server");
    server_cmd->add_option("--listen", server_opts.listen, "ingest host:port")->capture_default_str();
    server_cmd->add_option("--http", server_opts.http, "HTTP host:port")->capture_default_str();
    server_cmd->add_option("--data-dir", server_opts.data_dir, "log directory")->capture_default_str();
    server_cmd->add_option("--period", server_opts.period, "sample period for summaries")->capture_default_str();

    std::string hs_obd;
    int hs_timeout = 2000;
    auto* hs_cmd = app.add_subcommand("handshake", "Run the init sequence against an emulator and print it");
    hs_cmd->add_option("--obd", hs_obd, "adapter host:port or serial device path")->required();
    hs_cmd->add_option("--timeout", hs_timeout, "per-command timeout in ms")->capture_default_str();

    ReplayOptions replay_opts;
    auto* replay_cmd = app.add_subcommand("replay", "Replay a scenario end to end and print the trip summary");
    replay_cmd->add_option("scenario", replay_opts.scenario, "scenario file")->required()->check(CLI::ExistingFile);
    replay_cmd->add_option("--fuel", replay_opts.fuel, "petrol|diesel")->capture_default_str();
    replay_cmd->add_option("--csv", replay_opts.csv, "write the stored samples as CSV");
    replay_cmd->add_option("--period", replay_opts.period, "poll period in seconds")->capture_default_str();
    replay_cmd->add_option("--protocol", replay_opts.protocol, "vehicle protocol")->capture_default_str();
    replay_cmd->add_option("--vehicle-id", replay_opts.vehicle_id, "vehicle identifier")->capture_default_str();

    CLI11_PARSE(app, argc, argv);
    install_signal_handlers();

    try {
        if (*decode) return run_decode(decode_args);
        if (*emu_cmd) return run_emu(emu_opts);
        if (*agent_cmd) return run_agent(agent_opts);
        if (*server_cmd) return run_server(server_opts);
        if (*hs_cmd) return run_handshake(hs_obd, hs_timeout);
        if (*replay_cmd) return run_replay(replay_opts);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 1;
}
