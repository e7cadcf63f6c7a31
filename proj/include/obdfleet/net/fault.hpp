#pragma once

#include "obdfleet/net/stream.hpp"

#include <atomic>
#include <memory>

namespace obdfleet::net {

/// Connector whose link can be cut and restored. While the link is down,
/// connect() and every I/O call on a stream it handed out throw LinkDown;
/// streams opened before an outage stay dead afterwards.
class FaultyConnector final : public Connector {
public:
    explicit FaultyConnector(Connector& inner) : inner_(&inner) {}

    void set_link_up(bool up);
    bool link_up() const noexcept { return state_->up; }
    std::uint64_t refused_connects() const noexcept { return refused_; }

    std::unique_ptr<ByteStream> connect() override;

    struct State {
        std::atomic<bool> up{true};
        std::atomic<std::uint64_t> epoch{0};
    };

private:
    Connector* inner_;
    std::shared_ptr<State> state_ = std::make_shared<State>();
    std::uint64_t refused_ = 0;
};

} // namespace obdfleet::net
