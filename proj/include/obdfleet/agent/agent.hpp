#pragma once

#include "obdfleet/agent/elm_client.hpp"
#include "obdfleet/metrics/metrics.hpp"
#include "obdfleet/net/stream.hpp"
#include "obdfleet/telemetry.hpp"

#include <array>
#include <chrono>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace obdfleet::agent {

struct AgentConfig {
    double poll_period_s = 1.0;
    metrics::FuelModel fuel_model = metrics::FuelModel::petrol();
    std::string server_address;
    std::size_t buffer_capacity = 3600;
    std::chrono::milliseconds handshake_timeout{2000};
    std::chrono::milliseconds command_timeout{1000};
    std::chrono::milliseconds ack_timeout{2000};
    std::uint64_t first_seq = 1;

    /// Throws std::invalid_argument when poll_period_s <= 0 or capacity is 0.
    void validate() const;
};

/// The initialisation sequence, in order.
inline const std::vector<std::string> kInitSequence = {"ATZ", "ATSP0", "ATE0", "ATFE", "ATS0", "0100"};

struct NegotiatedState {
    std::string version;
    bool echo_enabled = true;
    bool spaces_enabled = true;
    std::array<std::uint8_t, 4> supported_pids{};

    bool supports(std::uint8_t pid) const noexcept;
};

/// Latest NMEA sentence from whatever GPS receiver is attached.
class GpsSource {
public:
    virtual ~GpsSource() = default;
    virtual std::optional<std::string> latest_sentence() = 0;
};

/// OBD reader control logic: bring-up, then one TelemetrySample per poll.
class Agent {
public:
    /// UTC milliseconds.
    using Clock = std::function<std::int64_t()>;

    Agent(AgentConfig config, std::string vehicle_id, net::ByteStream& obd, Clock clock, GpsSource* gps = nullptr);

    /// Sends kInitSequence, waiting for the prompt after each.
    /// Throws Error(HandshakeTimeout) or Error(UnexpectedReply).
    const NegotiatedState& initialize();

    /// Queries speed and MAF, reads GPS, derives fuel and distance.
    /// Throws Error(PidReadError) if either PID cannot be read; the sample
    /// is then skipped, seq is not consumed and distance is unchanged.
    TelemetrySample poll_cycle();

    double cumulative_distance_km() const noexcept { return distance_km_; }
    std::uint64_t next_seq() const noexcept { return next_seq_; }
    const AgentConfig& config() const noexcept { return config_; }
    const Elm327Client& client() const noexcept { return client_; }
    std::uint64_t skipped_cycles() const noexcept { return skipped_; }

private:
    codec::ObdResponse query(codec::Pid pid);

    AgentConfig config_;
    std::string vehicle_id_;
    Elm327Client client_;
    Clock clock_;
    GpsSource* gps_;
    std::optional<NegotiatedState> negotiated_;
    std::uint64_t next_seq_;
    double distance_km_ = 0.0;
    std::uint64_t skipped_ = 0;
};

} // namespace obdfleet::agent
