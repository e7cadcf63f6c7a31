#include "obdfleet/net/fault.hpp"

#include "obdfleet/error.hpp"

namespace obdfleet::net {

namespace {

class FaultyStream final : public ByteStream {
public:
    FaultyStream(std::unique_ptr<ByteStream> inner, std::shared_ptr<FaultyConnector::State> state)
        : inner_(std::move(inner)), state_(std::move(state)), epoch_(state_->epoch)
    {
    }

    void write(std::string_view bytes) override
    {
        check();
        inner_->write(bytes);
    }

    std::optional<std::string> read_some(std::chrono::milliseconds timeout) override
    {
        check();
        return inner_->read_some(timeout);
    }

private:
    void check() const
    {
        if (!state_->up || state_->epoch != epoch_) throw Error(Errc::LinkDown, "link interrupted");
    }

    std::unique_ptr<ByteStream> inner_;
    std::shared_ptr<FaultyConnector::State> state_;
    std::uint64_t epoch_;
};

} // namespace

void FaultyConnector::set_link_up(bool up)
{
    if (!up && state_->up) ++state_->epoch;
    state_->up = up;
}

std::unique_ptr<ByteStream> FaultyConnector::connect()
{
    if (!state_->up) {
        ++refused_;
        throw Error(Errc::LinkDown, "link is down");
    }
    return std::make_unique<FaultyStream>(inner_->connect(), state_);
}

} // namespace obdfleet::net
