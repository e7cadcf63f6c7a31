#pragma once

// Line protocol spoken on the ingest port. Each request is one line and gets
// exactly one reply line:
//
//   {...sample json...}        -> ACK <seq> | NAK
//   VEHICLES                   -> JSON array of vehicle records
//   LAST <id>                  -> LAST <seq>
//   QUERY <id> <t0> <t1>       -> JSON array of samples
//   SUMMARY <id> <t0> <t1>     -> JSON trip summary
//   POSITION <id>              -> JSON position
//
// Failed queries reply "ERR <code> <message>".

#include "obdfleet/net/stream.hpp"
#include "obdfleet/net/tcp.hpp"
#include "obdfleet/server/fleet.hpp"

#include <atomic>
#include <list>
#include <mutex>
#include <thread>

namespace obdfleet::server {

std::string vehicles_to_json(const std::vector<VehicleRecord>& vehicles);
std::string position_to_json(const PositionReport& report);

class LineProtocol {
public:
    LineProtocol(SampleStore& store, Ingestor::Clock clock, double sample_period_s = 1.0)
        : ingestor_(store, std::move(clock)), queries_(store, sample_period_s)
    {
    }

    /// Reply without the trailing newline. Error(StorageFailure) propagates:
    /// the caller must not answer.
    std::string handle(std::string_view line);

    Ingestor& ingestor() noexcept { return ingestor_; }
    const FleetQueries& queries() const noexcept { return queries_; }

private:
    Ingestor ingestor_;
    FleetQueries queries_;
};

/// TCP front end; one thread per connection, each feeding the shared
/// LineProtocol.
class IngestServer {
public:
    IngestServer(const net::Endpoint& listen, LineProtocol& protocol);
    ~IngestServer();

    std::uint16_t port() const noexcept { return listener_.port(); }
    void start();
    void stop();

private:
    void serve(std::unique_ptr<net::TcpStream> conn);

    net::TcpListener listener_;
    LineProtocol* protocol_;
    std::atomic<bool> running_{false};
    std::thread acceptor_;
    std::mutex mutex_;
    std::list<std::thread> workers_;
    std::vector<net::TcpStream*> live_;
};

/// In-process connection to a LineProtocol: each complete line written is
/// handled synchronously and its reply queued for read_some().
class LoopbackLineStream final : public net::ByteStream {
public:
    explicit LoopbackLineStream(LineProtocol& protocol) : protocol_(&protocol) {}

    void write(std::string_view bytes) override;
    std::optional<std::string> read_some(std::chrono::milliseconds timeout) override;

private:
    LineProtocol* protocol_;
    std::string pending_;
    std::string out_;
    bool closed_ = false;
};

class LoopbackConnector final : public net::Connector {
public:
    explicit LoopbackConnector(LineProtocol& protocol) : protocol_(&protocol) {}
    std::unique_ptr<net::ByteStream> connect() override { return std::make_unique<LoopbackLineStream>(*protocol_); }

private:
    LineProtocol* protocol_;
};

} // namespace obdfleet::server
