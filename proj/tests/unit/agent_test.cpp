#include "obdfleet/agent/agent.hpp"

#include "obdfleet/emu/server.hpp"
#include "test_util.hpp"

#include <functional>
#include <map>

using namespace obdfleet;
using namespace obdfleet::agent;
using namespace std::chrono_literals;

namespace {

std::shared_ptr<const emu::Scenario> constant(std::uint8_t speed, std::uint16_t maf)
{
    return std::make_shared<const emu::Scenario>(
        std::vector<emu::ScenarioTick>{{0.0, codec::SpeedKmh{speed}, codec::MafGramsPerSec{maf}, std::nullopt}});
}

/// A fake adapter answering each CR-terminated command through a callback.
class FakeAdapter final : public net::ByteStream {
public:
    using Responder = std::function<std::optional<std::string>(const std::string&)>;
    explicit FakeAdapter(Responder r) : respond_(std::move(r)) {}

    void write(std::string_view bytes) override
    {
        for (char c : bytes) {
            if (c != '\r') {
                line_ += c;
                continue;
            }
            if (auto reply = respond_(line_)) out_ += *reply;
            line_.clear();
        }
    }
    std::optional<std::string> read_some(std::chrono::milliseconds timeout) override
    {
        if (out_.empty()) {
            std::this_thread::sleep_for(std::min(timeout, 5ms));
            return std::nullopt;
        }
        return std::exchange(out_, {});
    }

private:
    Responder respond_;
    std::string line_;
    std::string out_;
};

struct Bench {
    explicit Bench(std::shared_ptr<const emu::Scenario> s, AgentConfig config = {})
        : session(std::move(s), emu::Protocol::Auto, [this] { return now_s; }), stream(session),
          agent(config, "car-1", stream, [this] { return static_cast<std::int64_t>(now_s * 1000); })
    {
    }
    double now_s = 0;
    emu::Elm327Session session;
    emu::LoopbackElmStream stream;
    Agent agent;
};

} // namespace

TEST(AgentConfig, Validation)
{
    AgentConfig c;
    EXPECT_NO_THROW(c.validate());
    c.poll_period_s = 0;
    EXPECT_THROW(c.validate(), std::invalid_argument);
    c.poll_period_s = 1;
    c.buffer_capacity = 0;
    EXPECT_THROW(c.validate(), std::invalid_argument);
}

TEST(AgentInitialize, SendsTheSixCommandsInOrder)
{
    Bench b(constant(0, 0));
    const auto& st = b.agent.initialize();
    EXPECT_EQ(b.session.command_log(), kInitSequence);
    EXPECT_EQ(b.agent.client().sent(), kInitSequence);
    EXPECT_EQ(st.version, "ELM327 v1.4b");
    EXPECT_FALSE(st.echo_enabled);
    EXPECT_FALSE(st.spaces_enabled);
    EXPECT_TRUE(st.supports(0x0D));
    EXPECT_TRUE(st.supports(0x10));
    EXPECT_FALSE(st.supports(0x0C));
    EXPECT_FALSE(st.supports(0x5E));
    EXPECT_FALSE(b.session.state().echo_enabled);
    EXPECT_TRUE(b.session.state().protocol_locked);
    for (const auto& raw : b.agent.client().transcript()) EXPECT_TRUE(raw.ends_with(">")) << raw;
}

TEST(AgentInitialize, SilentAdapterTimesOut)
{
    AgentConfig c;
    c.handshake_timeout = 50ms;
    FakeAdapter silent([](const std::string&) { return std::nullopt; });
    Agent a(c, "x", silent, [] { return std::int64_t{0}; });
    const auto start = std::chrono::steady_clock::now();
    EXPECT_ERRC(a.initialize(), Errc::HandshakeTimeout);
    EXPECT_LT(std::chrono::steady_clock::now() - start, 1s);
}

TEST(AgentInitialize, UnexpectedReplies)
{
    std::map<std::string, std::string> replies = {{"ATZ", "OBDII v2\r\r>"}};
    auto responder = [&](const std::string& cmd) -> std::optional<std::string> {
        if (auto it = replies.find(cmd); it != replies.end()) return it->second;
        return "OK\r\r>";
    };
    {
        FakeAdapter adapter(responder);
        Agent a({}, "x", adapter, [] { return std::int64_t{0}; });
        EXPECT_ERRC(a.initialize(), Errc::UnexpectedReply);
    }
    replies = {{"ATZ", "ELM327 v1.4b\r\r>"}, {"ATS0", "?\r\r>"}};
    {
        FakeAdapter adapter(responder);
        Agent a({}, "x", adapter, [] { return std::int64_t{0}; });
        EXPECT_ERRC(a.initialize(), Errc::UnexpectedReply);
    }
    replies = {{"ATZ", "ELM327 v1.4b\r\r>"}, {"0100", "UNABLE TO CONNECT\r\r>"}};
    {
        FakeAdapter adapter(responder);
        Agent a({}, "x", adapter, [] { return std::int64_t{0}; });
        EXPECT_ERRC(a.initialize(), Errc::UnexpectedReply);
    }
}

TEST(AgentPoll, SpeedMafAndFuel)
{
    Bench b(constant(50, 380));
    b.agent.initialize();
    const auto s = b.agent.poll_cycle();
    EXPECT_EQ(s.vehicle_id, "car-1");
    EXPECT_EQ(s.seq, 1u);
    EXPECT_EQ(s.speed_kmh, 50);
    EXPECT_DOUBLE_EQ(s.maf_gs, 3.80);
    ASSERT_TRUE(s.fuel_l_per_km);
    EXPECT_NEAR(*s.fuel_l_per_km, 0.02270, 0.000005);
    EXPECT_NEAR(s.cumulative_distance_km, 50.0 / 3600, 1e-15);
    EXPECT_FALSE(s.fix);
    EXPECT_EQ(b.agent.client().sent().back(), "0110");
}

TEST(AgentPoll, StoppedVehicleHasNoFuelFigureAndNoDistance)
{
    Bench b(constant(0, 385));
    b.agent.initialize();
    const auto s = b.agent.poll_cycle();
    EXPECT_FALSE(s.fuel_l_per_km);
    EXPECT_EQ(s.cumulative_distance_km, 0.0);
}

TEST(AgentPoll, DistanceAcrossTwoCycles)
{
    Bench b(constant(36, 500));
    b.agent.initialize();
    const auto first = b.agent.poll_cycle();
    b.now_s = 1;
    const auto second = b.agent.poll_cycle();
    EXPECT_NEAR(second.cumulative_distance_km - first.cumulative_distance_km, 0.01, 1e-15);
    EXPECT_EQ(second.seq, first.seq + 1);
    EXPECT_EQ(second.timestamp_ms - first.timestamp_ms, 1000);
}

TEST(AgentPoll, DistanceMatchesAFoldOverReportedSpeeds)
{
    const auto s = std::make_shared<const emu::Scenario>(emu::load_scenario(testutil::fixture("long_trip.scn")));
    AgentConfig c;
    c.poll_period_s = 1.0;
    Bench b(s, c);
    b.agent.initialize();
    double fold = 0;
    for (int i = 0; i < 450; ++i) {
        b.now_s = i;
        const auto sample = b.agent.poll_cycle();
        fold = metrics::integrate_distance(fold, sample.speed_kmh, 1.0);
        ASSERT_NEAR(sample.cumulative_distance_km, fold, 1e-9);
    }
    EXPECT_NEAR(b.agent.cumulative_distance_km(), 8.5, 1e-9);
}

TEST(AgentPoll, PidErrorSkipsTheCycleWithoutConsumingSeq)
{
    bool broken = false;
    FakeAdapter adapter([&](const std::string& cmd) -> std::optional<std::string> {
        if (cmd == "ATZ") return "ELM327 v1.4b\r\r>";
        if (cmd == "0100") return "4100000900 00\r\r>";
        if (cmd == "010D") return broken ? "NO DATA\r\r>" : "410D24\r\r>";
        if (cmd == "0110") return "411001F4\r\r>";
        return "OK\r\r>";
    });
    Agent a({}, "x", adapter, [] { return std::int64_t{0}; });
    a.initialize();
    const auto first = a.poll_cycle();
    broken = true;
    EXPECT_ERRC(a.poll_cycle(), Errc::PidReadError);
    EXPECT_EQ(a.skipped_cycles(), 1u);
    EXPECT_EQ(a.cumulative_distance_km(), first.cumulative_distance_km);
    broken = false;
    EXPECT_EQ(a.poll_cycle().seq, first.seq + 1);
}

TEST(AgentPoll, RequiresInitialisation)
{
    Bench b(constant(50, 380));
    EXPECT_ERRC(b.agent.poll_cycle(), Errc::PidReadError);
    // The emulator itself refuses PIDs before the protocol search.
    EXPECT_EQ(b.session.feed("ATE0\r010D\r"), "ATE0\rOK\r\r>NO DATA\r\r>");
}

TEST(AgentPoll, AttachesTheLatestGpsFix)
{
    struct Gps final : GpsSource {
        std::optional<std::string> sentence;
        std::optional<std::string> latest_sentence() override { return sentence; }
    } gps;
    auto s = constant(10, 100);
    emu::Elm327Session session(s, emu::Protocol::Auto, nullptr);
    emu::LoopbackElmStream stream(session);
    Agent a({}, "g", stream, [] { return std::int64_t{5}; }, &gps);
    a.initialize();
    EXPECT_FALSE(a.poll_cycle().fix);
    gps.sentence = "$GPGLL,4916.45,N,12311.12,W,225444,A*31";
    const auto with_fix = a.poll_cycle();
    ASSERT_TRUE(with_fix.fix);
    EXPECT_NEAR(with_fix.fix->latitude, 49.27417, 1e-5);
    gps.sentence = "$GPGLL,4916.45,N,12311.12,W,225444,A*00";
    EXPECT_FALSE(a.poll_cycle().fix);
}

TEST(AgentOverTcp, HandshakeAgainstTheEmulatorServer)
{
    auto scenario = constant(50, 380);
    emu::Elm327Server server({"127.0.0.1", 0}, scenario, emu::Protocol::Can11,
                             std::make_shared<const emu::ScenarioClock>());
    server.start();
    auto conn = net::TcpStream::connect({"127.0.0.1", server.port()}, 1000ms);
    Agent a({}, "tcp", *conn, [] { return std::int64_t{0}; });
    a.initialize();
    EXPECT_EQ(server.command_log(), kInitSequence);
    EXPECT_EQ(a.poll_cycle().speed_kmh, 50);
    server.stop();
}

TEST(AgentOverPty, HandshakeThroughAPseudoTerminal)
{
    testutil::TempDir dir;
    emu::Elm327PtyServer server(dir.path() / "elm", constant(42, 500), emu::Protocol::Iso9141,
                                std::make_shared<const emu::ScenarioClock>());
    server.start();
    auto tty = net::SerialStream::open(server.path());
    Agent a({}, "pty", *tty, [] { return std::int64_t{0}; });
    const auto& negotiated = a.initialize();
    EXPECT_EQ(negotiated.version, "ELM327 v1.4b");
    const auto s = a.poll_cycle();
    EXPECT_EQ(s.speed_kmh, 42);
    EXPECT_DOUBLE_EQ(s.maf_gs, 5.0);
    server.stop();
}

TEST(ElmClient, MinimalHandshake)
{
    emu::Elm327Session session(constant(0, 0), emu::Protocol::Auto, nullptr);
    emu::LoopbackElmStream stream(session);
    Elm327Client client(stream, 200ms);
    EXPECT_EQ(run_init_handshake(client), "41 00 00 09 00 00");
    EXPECT_EQ(session.command_log(), (std::vector<std::string>{"ATZ", "ATSP0", "0100"}));
    EXPECT_TRUE(session.state().protocol_locked);
    EXPECT_EQ(client.transcript().front(), "ATZ\rELM327 v1.4b\r\r>");
}
