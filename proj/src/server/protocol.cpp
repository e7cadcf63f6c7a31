#include "obdfleet/server/protocol.hpp"

#include "obdfleet/error.hpp"

#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <sstream>

namespace obdfleet::server {

using nlohmann::json;
using namespace std::chrono_literals;

namespace {

json fix_to_json(const nmea::GeoFix& fix)
{
    return {{"lat", fix.latitude},
            {"lon", fix.longitude},
            {"utc", fix.utc_time.to_string()},
            {"status", fix.valid() ? "A" : "V"}};
}

std::vector<std::string> split_words(std::string_view line)
{
    std::istringstream in{std::string(line)};
    std::vector<std::string> words;
    for (std::string w; in >> w;) words.push_back(std::move(w));
    return words;
}

std::int64_t parse_time(const std::string& text)
{
    std::int64_t v = 0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc{} || ptr != text.data() + text.size()) {
        throw Error(Errc::InvalidRange, "bad timestamp '" + text + "'");
    }
    return v;
}

void expect_args(const std::vector<std::string>& words, std::size_t n)
{
    if (words.size() != n + 1) {
        throw Error(Errc::MalformedRecord, words[0] + " takes " + std::to_string(n) + " argument(s)");
    }
}

} // namespace

std::string vehicles_to_json(const std::vector<VehicleRecord>& vehicles)
{
    json arr = json::array();
    for (const auto& v : vehicles) {
        arr.push_back({{"vehicle_id", v.vehicle_id},
                       {"last_seq", v.last_seq},
                       {"last_seen", v.last_seen_ms},
                       {"latest_fix", v.latest_fix ? fix_to_json(*v.latest_fix) : json(nullptr)}});
    }
    return arr.dump();
}

std::string position_to_json(const PositionReport& report)
{
    auto j = fix_to_json(report.fix);
    j["timestamp"] = report.timestamp_ms;
    j["seq"] = report.seq;
    return j.dump();
}

std::string LineProtocol::handle(std::string_view line)
{
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.remove_suffix(1);
    if (line.empty()) return "NAK";
    if (line.front() == '{') return ingestor_.ingest(line);

    const auto words = split_words(line);
    const auto& verb = words[0];
    try {
        if (verb == "VEHICLES") {
            expect_args(words, 0);
            return vehicles_to_json(queries_.vehicles());
        }
        if (verb == "LAST") {
            expect_args(words, 1);
            const auto rec = queries_.vehicles();
            const auto it = std::find_if(rec.begin(), rec.end(), [&](const auto& r) { return r.vehicle_id == words[1]; });
            if (it == rec.end()) throw Error(Errc::UnknownVehicle, "no samples for vehicle '" + words[1] + "'");
            return "LAST " + std::to_string(it->last_seq);
        }
        if (verb == "QUERY") {
            expect_args(words, 3);
            return samples_to_json(queries_.query_samples(words[1], parse_time(words[2]), parse_time(words[3])));
        }
        if (verb == "SUMMARY") {
            expect_args(words, 3);
            return summary_to_json(queries_.trip_summary(words[1], parse_time(words[2]), parse_time(words[3])));
        }
        if (verb == "POSITION") {
            expect_args(words, 1);
            return position_to_json(queries_.latest_position(words[1]));
        }
    } catch (const Error& e) {
        if (e.code() == Errc::StorageFailure) throw;
        return "ERR " + std::string(to_string(e.code())) + " " + e.what();
    }
    return "NAK";
}

IngestServer::IngestServer(const net::Endpoint& listen, LineProtocol& protocol)
    : listener_(listen), protocol_(&protocol)
{
}

IngestServer::~IngestServer()
{
    stop();
}

void IngestServer::start()
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

void IngestServer::stop()
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

void IngestServer::serve(std::unique_ptr<net::TcpStream> conn)
{
    net::LineReader reader(*conn);
    try {
        while (running_) {
            const auto line = reader.read_line(100ms);
            if (!line) continue;
            conn->write(protocol_->handle(*line) + '\n');
        }
    } catch (const Error&) {
        // Peer gone, or storage failed: either way the client sees no ack
        // and will resend on a fresh connection.
    }
    conn->shutdown();
    std::lock_guard lock(mutex_);
    live_.erase(std::remove(live_.begin(), live_.end(), conn.get()), live_.end());
}

void LoopbackLineStream::write(std::string_view bytes)
{
    if (closed_) throw Error(Errc::LinkDown, "loopback stream closed");
    pending_ += bytes;
    for (auto nl = pending_.find('\n'); nl != std::string::npos; nl = pending_.find('\n')) {
        const auto line = pending_.substr(0, nl);
        pending_.erase(0, nl + 1);
        try {
            out_ += protocol_->handle(line) + '\n';
        } catch (const Error&) {
            closed_ = true;
            throw Error(Errc::LinkDown, "server dropped the connection");
        }
    }
}

std::optional<std::string> LoopbackLineStream::read_some(std::chrono::milliseconds)
{
    if (out_.empty()) {
        if (closed_) throw Error(Errc::LinkDown, "loopback stream closed");
        return std::nullopt;
    }
    return std::exchange(out_, {});
}

} // namespace obdfleet::server
