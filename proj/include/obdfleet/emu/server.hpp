#pragma once

// Network front ends for the emulator: a TCP listener speaking the ELM327
// dialect, a GPS feed streaming NMEA GLL lines, and an in-process loopback
// stream for hermetic wiring.

#include "obdfleet/emu/elm327.hpp"
#include "obdfleet/net/serial.hpp"
#include "obdfleet/net/stream.hpp"
#include "obdfleet/net/tcp.hpp"

#include <atomic>
#include <list>
#include <mutex>
#include <thread>

namespace obdfleet::emu {

/// Seconds of scenario time elapsed since construction, scaled.
class ScenarioClock {
public:
    explicit ScenarioClock(double time_scale = 1.0);
    double now() const;

private:
    std::chrono::steady_clock::time_point start_;
    double scale_;
};

/// ByteStream whose far end is an Elm327Session in the same process.
/// Replies are available immediately after write(); read_some never blocks.
class LoopbackElmStream final : public net::ByteStream {
public:
    explicit LoopbackElmStream(Elm327Session& session) : session_(&session) {}

    void write(std::string_view bytes) override { out_ += session_->feed(bytes); }
    std::optional<std::string> read_some(std::chrono::milliseconds) override;

private:
    Elm327Session* session_;
    std::string out_;
};

/// Accepts TCP connections; each gets its own Elm327Session sharing the
/// read-only scenario and clock.
class Elm327Server {
public:
    Elm327Server(const net::Endpoint& listen, std::shared_ptr<const Scenario> scenario, Protocol vehicle_protocol,
                 std::shared_ptr<const ScenarioClock> clock);
    ~Elm327Server();

    std::uint16_t port() const noexcept { return listener_.port(); }
    void start();
    void stop();

    /// Commands received on every connection so far, in arrival order.
    std::vector<std::string> command_log() const;

private:
    void serve(std::unique_ptr<net::TcpStream> conn);

    net::TcpListener listener_;
    std::shared_ptr<const Scenario> scenario_;
    Protocol vehicle_protocol_;
    std::shared_ptr<const ScenarioClock> clock_;
    std::atomic<bool> running_{false};
    std::thread acceptor_;
    mutable std::mutex mutex_;
    std::list<std::thread> workers_;
    std::vector<net::TcpStream*> live_;
    std::vector<std::string> log_;
};

/// One session served over a pseudo-terminal published at `link_path`.
/// Every client opening the device talks to the same adapter state, as with
/// a physical serial adapter.
class Elm327PtyServer {
public:
    Elm327PtyServer(const std::filesystem::path& link_path, std::shared_ptr<const Scenario> scenario,
                    Protocol vehicle_protocol, std::shared_ptr<const ScenarioClock> clock);
    ~Elm327PtyServer();

    const std::filesystem::path& path() const noexcept { return pty_.link_path(); }
    void start();
    void stop();

private:
    net::PseudoTerminal pty_;
    Elm327Session session_;
    std::atomic<bool> running_{false};
    std::thread thread_;
};

/// Streams "$GPGLL...\r\n" once per scenario second to every client, for
/// ticks that carry a fix.
class GpsFeedServer {
public:
    GpsFeedServer(const net::Endpoint& listen, std::shared_ptr<const Scenario> scenario,
                  std::shared_ptr<const ScenarioClock> clock);
    ~GpsFeedServer();

    std::uint16_t port() const noexcept { return listener_.port(); }
    void start();
    void stop();

private:
    net::TcpListener listener_;
    std::shared_ptr<const Scenario> scenario_;
    std::shared_ptr<const ScenarioClock> clock_;
    std::atomic<bool> running_{false};
    std::thread acceptor_;
    std::thread broadcaster_;
    std::mutex mutex_;
    std::vector<std::unique_ptr<net::TcpStream>> clients_;
};

} // namespace obdfleet::emu
