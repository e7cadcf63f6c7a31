#pragma once

// Read-only HTTP/JSON view of the fleet:
//   GET /vehicles
//   GET /vehicles/{id}/samples?from=&to=
//   GET /vehicles/{id}/summary?from=&to=[&period=]
//   GET /vehicles/{id}/position
//   GET /vehicles/{id}/export.csv?from=&to=
//   GET /vehicles/{id}/export.json?from=&to=
// Unknown vehicle or missing fix: 404. Empty trip: 422. Bad parameter: 400.

#include "obdfleet/net/tcp.hpp"
#include "obdfleet/server/fleet.hpp"

#include <memory>
#include <thread>

namespace obdfleet::server {

class HttpApi {
public:
    HttpApi(const FleetQueries& queries, const net::Endpoint& listen);
    ~HttpApi();

    /// Binds immediately; port() is valid after construction.
    std::uint16_t port() const noexcept { return port_; }
    void start();
    void stop();

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
    std::uint16_t port_ = 0;
    std::thread thread_;
};

} // namespace obdfleet::server
