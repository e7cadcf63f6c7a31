#include "obdfleet/server/http.hpp"

#include "obdfleet/error.hpp"
#include "obdfleet/server/protocol.hpp"

#include <httplib.h>
#include <json.hpp>

#include <charconv>

namespace obdfleet::server {

namespace {

int status_for(Errc code)
{
    switch (code) {
    case Errc::UnknownVehicle:
    case Errc::NoFixAvailable:
        return 404;
    case Errc::EmptyTrip:
        return 422;
    case Errc::InvalidRange:
    case Errc::NonPositiveDt:
        return 400;
    default:
        return 500;
    }
}

std::int64_t time_param(const httplib::Request& req, const char* name, std::int64_t fallback)
{
    if (!req.has_param(name)) return fallback;
    const auto text = req.get_param_value(name);
    std::int64_t v = 0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (text.empty() || ec != std::errc{} || ptr != text.data() + text.size()) {
        throw Error(Errc::InvalidRange, std::string("bad '") + name + "' parameter: " + text);
    }
    return v;
}

std::optional<double> period_param(const httplib::Request& req)
{
    if (!req.has_param("period")) return std::nullopt;
    const auto text = req.get_param_value("period");
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (text.empty() || ec != std::errc{} || ptr != text.data() + text.size() || !(v > 0.0)) {
        throw Error(Errc::InvalidRange, "bad 'period' parameter: " + text);
    }
    return v;
}

template <typename F>
httplib::Server::Handler guarded(const char* content_type, F body)
{
    return [content_type, body](const httplib::Request& req, httplib::Response& res) {
        try {
            res.set_content(body(req), content_type);
        } catch (const Error& e) {
            res.status = status_for(e.code());
            const nlohmann::json err = {{"error", std::string(to_string(e.code()))}, {"message", e.what()}};
            res.set_content(err.dump(), "application/json");
        }
    };
}

} // namespace

struct HttpApi::Impl {
    httplib::Server server;
};

HttpApi::HttpApi(const FleetQueries& queries, const net::Endpoint& listen) : impl_(std::make_unique<Impl>())
{
    auto& s = impl_->server;
    const auto* q = &queries;
    constexpr auto kJson = "application/json";

    s.Get("/vehicles", guarded(kJson, [q](const auto&) { return vehicles_to_json(q->vehicles()); }));
    s.Get(R"(/vehicles/([^/]+)/samples)", guarded(kJson, [q](const httplib::Request& r) {
              return samples_to_json(q->query_samples(r.matches[1], time_param(r, "from", kTimeMin),
                                                      time_param(r, "to", kTimeMax)));
          }));
    s.Get(R"(/vehicles/([^/]+)/summary)", guarded(kJson, [q](const httplib::Request& r) {
              return summary_to_json(q->trip_summary(r.matches[1], time_param(r, "from", kTimeMin),
                                                     time_param(r, "to", kTimeMax), period_param(r)));
          }));
    s.Get(R"(/vehicles/([^/]+)/position)", guarded(kJson, [q](const httplib::Request& r) {
              return position_to_json(q->latest_position(r.matches[1]));
          }));
    s.Get(R"(/vehicles/([^/]+)/export\.csv)", guarded("text/csv", [q](const httplib::Request& r) {
              return q->export_csv(r.matches[1], time_param(r, "from", kTimeMin), time_param(r, "to", kTimeMax));
          }));
    s.Get(R"(/vehicles/([^/]+)/export\.json)", guarded(kJson, [q](const httplib::Request& r) {
              return q->export_json(r.matches[1], time_param(r, "from", kTimeMin), time_param(r, "to", kTimeMax));
          }));

    if (listen.port == 0) {
        const int port = s.bind_to_any_port(listen.host);
        if (port < 0) throw Error(Errc::LinkDown, "cannot bind HTTP on " + listen.host);
        port_ = static_cast<std::uint16_t>(port);
    } else {
        if (!s.bind_to_port(listen.host, listen.port)) throw Error(Errc::LinkDown, "cannot bind HTTP on " + listen.to_string());
        port_ = listen.port;
    }
}

HttpApi::~HttpApi()
{
    stop();
}

void HttpApi::start()
{
    thread_ = std::thread([this] { impl_->server.listen_after_bind(); });
    impl_->server.wait_until_ready();
}

void HttpApi::stop()
{
    if (!thread_.joinable()) return;
    impl_->server.stop();
    thread_.join();
}

} // namespace obdfleet::server
