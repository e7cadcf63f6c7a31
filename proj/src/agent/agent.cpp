#include "obdfleet/agent/agent.hpp"

#include "obdfleet/error.hpp"
#include "obdfleet/nmea/gll.hpp"

#include <algorithm>
#include <stdexcept>

namespace obdfleet::agent {

void AgentConfig::validate() const
{
    if (!(poll_period_s > 0.0)) throw std::invalid_argument("poll period must be positive");
    if (buffer_capacity == 0) throw std::invalid_argument("buffer capacity must be at least 1");
}

bool NegotiatedState::supports(std::uint8_t pid) const noexcept
{
    if (pid == 0 || pid > 0x20) return false;
    const unsigned index = pid - 1u;
    return (supported_pids[index / 8] & (0x80u >> (index % 8))) != 0;
}

Agent::Agent(AgentConfig config, std::string vehicle_id, net::ByteStream& obd, Clock clock, GpsSource* gps)
    : config_(std::move(config)),
      vehicle_id_(std::move(vehicle_id)),
      client_(obd, config_.handshake_timeout),
      clock_(std::move(clock)),
      gps_(gps),
      next_seq_(config_.first_seq)
{
    config_.validate();
}

const NegotiatedState& Agent::initialize()
{
    NegotiatedState state;
    try {
        for (const auto& cmd : kInitSequence) {
            const auto reply = client_.command(cmd);
            if (cmd == "ATZ") {
                if (reply.find("ELM327") == std::string::npos) {
                    throw Error(Errc::UnexpectedReply, "ATZ reply lacks the ELM327 banner: '" + reply + "'");
                }
                state.version = reply;
                state.echo_enabled = true;
                state.spaces_enabled = true;
            } else if (cmd == "0100") {
                const codec::ObdRequest req(codec::kCurrentDataMode, codec::Pid::SupportedPids);
                codec::ObdResponse resp;
                try {
                    resp = codec::parse_response(reply, req);
                } catch (const Error& e) {
                    throw Error(Errc::UnexpectedReply, "0100 replied '" + reply + "': " + e.what());
                }
                if (resp.data.size() < 4) throw Error(Errc::UnexpectedReply, "0100 bitmap shorter than 4 bytes");
                std::copy_n(resp.data.begin(), 4, state.supported_pids.begin());
            } else {
                if (reply != "OK") throw Error(Errc::UnexpectedReply, cmd + " replied '" + reply + "'");
                if (cmd == "ATE0") state.echo_enabled = false;
                if (cmd == "ATS0") state.spaces_enabled = false;
            }
        }
    } catch (const Error& e) {
        if (e.code() == Errc::TimedOut || e.code() == Errc::LinkDown) {
            throw Error(Errc::HandshakeTimeout, e.what());
        }
        throw;
    }
    negotiated_ = state;
    client_.set_timeout(config_.command_timeout);
    return *negotiated_;
}

codec::ObdResponse Agent::query(codec::Pid pid)
{
    const codec::ObdRequest req(codec::kCurrentDataMode, pid);
    auto line = codec::encode_request(req, false);
    line.pop_back(); // client adds the CR
    return codec::parse_response(client_.command(line), req);
}

TelemetrySample Agent::poll_cycle()
{
    if (!negotiated_) throw Error(Errc::PidReadError, "agent not initialised");

    codec::SpeedKmh speed;
    codec::MafGramsPerSec maf;
    try {
        speed = codec::decode_speed(query(codec::Pid::Speed));
        maf = codec::decode_maf(query(codec::Pid::Maf));
    } catch (const Error& e) {
        ++skipped_;
        throw Error(Errc::PidReadError, e.what());
    }

    TelemetrySample sample;
    sample.vehicle_id = vehicle_id_;
    sample.timestamp_ms = clock_();
    sample.speed_kmh = speed.value;
    sample.maf_gs = maf.grams_per_sec();
    sample.fuel_l_per_km = metrics::fuel_consumption(maf, speed, config_.fuel_model);
    distance_km_ = metrics::integrate_distance(distance_km_, sample.speed_kmh, config_.poll_period_s);
    sample.cumulative_distance_km = distance_km_;
    if (gps_) {
        if (auto sentence = gps_->latest_sentence()) {
            try {
                sample.fix = nmea::parse_gll(*sentence);
            } catch (const Error&) {
                // a corrupt sentence means no fix this cycle
            }
        }
    }
    sample.seq = next_seq_++;
    return sample;
}

} // namespace obdfleet::agent
