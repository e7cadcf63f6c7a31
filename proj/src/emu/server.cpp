#include "obdfleet/emu/server.hpp"

#include "obdfleet/error.hpp"

#include <algorithm>
#include <cmath>

namespace obdfleet::emu {

using namespace std::chrono_literals;

ScenarioClock::ScenarioClock(double time_scale) : start_(std::chrono::steady_clock::now()), scale_(time_scale) {}

double ScenarioClock::now() const
{
    const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start_;
    return elapsed.count() * scale_;
}

std::optional<std::string> LoopbackElmStream::read_some(std::chrono::milliseconds)
{
    if (out_.empty()) return std::nullopt;
    return std::exchange(out_, {});
}

Elm327Server::Elm327Server(const net::Endpoint& listen, std::shared_ptr<const Scenario> scenario,
                           Protocol vehicle_protocol, std::shared_ptr<const ScenarioClock> clock)
    : listener_(listen), scenario_(std::move(scenario)), vehicle_protocol_(vehicle_protocol), clock_(std::move(clock))
{
}

Elm327Server::~Elm327Server()
{
    stop();
}

void Elm327Server::start()
{
    running_ = true;
    acceptor_ = std::thread([this] {
        while (running_) {
            auto conn = listener_.accept(100ms);
            if (!conn) continue;
            std::lock_guard lock(mutex_);
            live_.push_back(conn.get());
            workers_.emplace_back([this, c = std::move(conn)]() mutable { serve(std::move(c)); });
        }
    });
}

void Elm327Server::stop()
{
    if (!running_.exchange(false)) return;
    if (acceptor_.joinable()) acceptor_.join();
    std::list<std::thread> workers;
    {
        std::lock_guard lock(mutex_);
        for (auto* conn : live_) conn->shutdown();
        workers.swap(workers_);
    }
    for (auto& t : workers) t.join();
}

std::vector<std::string> Elm327Server::command_log() const
{
    std::lock_guard lock(mutex_);
    return log_;
}

void Elm327Server::serve(std::unique_ptr<net::TcpStream> conn)
{
    Elm327Session session(scenario_, vehicle_protocol_, [clock = clock_] { return clock->now(); });
    std::size_t logged = 0;
    try {
        while (running_) {
            auto chunk = conn->read_some(100ms);
            if (!chunk) continue;
            const auto reply = session.feed(*chunk);
            {
                std::lock_guard lock(mutex_);
                const auto& log = session.command_log();
                log_.insert(log_.end(), log.begin() + static_cast<std::ptrdiff_t>(logged), log.end());
                logged = log.size();
            }
            if (!reply.empty()) conn->write(reply);
        }
    } catch (const Error&) {
        // peer went away
    }
    std::lock_guard lock(mutex_);
    live_.erase(std::remove(live_.begin(), live_.end(), conn.get()), live_.end());
}

Elm327PtyServer::Elm327PtyServer(const std::filesystem::path& link_path, std::shared_ptr<const Scenario> scenario,
                                 Protocol vehicle_protocol, std::shared_ptr<const ScenarioClock> clock)
    : pty_(link_path), session_(std::move(scenario), vehicle_protocol, [clock = std::move(clock)] { return clock->now(); })
{
}

Elm327PtyServer::~Elm327PtyServer()
{
    stop();
}

void Elm327PtyServer::start()
{
    running_ = true;
    thread_ = std::thread([this] {
        try {
            while (running_) {
                auto chunk = pty_.master().read_some(100ms);
                if (!chunk) continue;
                const auto reply = session_.feed(*chunk);
                if (!reply.empty()) pty_.master().write(reply);
            }
        } catch (const Error&) {
            // the pty itself failed; nothing left to serve
        }
    });
}

void Elm327PtyServer::stop()
{
    if (!running_.exchange(false)) return;
    if (thread_.joinable()) thread_.join();
}

GpsFeedServer::GpsFeedServer(const net::Endpoint& listen, std::shared_ptr<const Scenario> scenario,
                             std::shared_ptr<const ScenarioClock> clock)
    : listener_(listen), scenario_(std::move(scenario)), clock_(std::move(clock))
{
}

GpsFeedServer::~GpsFeedServer()
{
    stop();
}

void GpsFeedServer::start()
{
    running_ = true;
    acceptor_ = std::thread([this] {
        while (running_) {
            if (auto conn = listener_.accept(100ms)) {
                std::lock_guard lock(mutex_);
                clients_.push_back(std::move(conn));
            }
        }
    });
    broadcaster_ = std::thread([this] {
        long last_second = -1;
        while (running_) {
            std::this_thread::sleep_for(20ms);
            const double t = clock_->now();
            const long second = static_cast<long>(std::floor(t));
            if (second == last_second) continue;
            last_second = second;
            const auto& tick = sample_scenario(*scenario_, t);
            if (!tick.gll) continue;
            const auto line = nmea::render_gll(*tick.gll) + "\r\n";
            std::lock_guard lock(mutex_);
            std::erase_if(clients_, [&](const auto& c) {
                try {
                    c->write(line);
                    return false;
                } catch (const Error&) {
                    return true;
                }
            });
        }
    });
}

void GpsFeedServer::stop()
{
    if (!running_.exchange(false)) return;
    if (acceptor_.joinable()) acceptor_.join();
    if (broadcaster_.joinable()) broadcaster_.join();
    std::lock_guard lock(mutex_);
    clients_.clear();
}

} // namespace obdfleet::emu
