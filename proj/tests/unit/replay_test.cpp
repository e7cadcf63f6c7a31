#include "obdfleet/replay.hpp"

#include "test_util.hpp"

using namespace obdfleet;

namespace {

const emu::Scenario& short_trip()
{
    static const auto s = emu::load_scenario(testutil::fixture("short_trip.scn"));
    return s;
}

} // namespace

TEST(ReplayCycleCount, CoversTheLastTick)
{
    EXPECT_EQ(replay_cycle_count(short_trip(), 1.0), 100u);
    EXPECT_EQ(replay_cycle_count(short_trip(), 0.1), 991u);
    EXPECT_EQ(replay_cycle_count(short_trip(), 2.0), 50u);
    EXPECT_THROW(replay_cycle_count(short_trip(), 0.0), std::invalid_argument);
}

TEST(Replay, ServerAgreesWithAgent)
{
    const auto r = replay(short_trip(), {});
    EXPECT_EQ(r.server_samples.size(), 100u);
    EXPECT_EQ(r.server_samples, r.agent_samples);
    EXPECT_EQ(r.server_summary, r.agent_summary);
    EXPECT_EQ(r.handshake_commands.front(), "ATZ");
    EXPECT_EQ(r.dropped, 0u);
    EXPECT_EQ(r.rejected, 0u);
}

TEST(Replay, IsDeterministic)
{
    ReplayConfig c;
    c.fuel_model = metrics::FuelModel::diesel();
    c.period_s = 0.5;
    const auto a = replay(short_trip(), c);
    const auto b = replay(short_trip(), c);
    EXPECT_EQ(a.server_samples, b.server_samples);
    EXPECT_EQ(a.server_summary, b.server_summary);
    EXPECT_EQ(a.handshake_replies, b.handshake_replies);
}

TEST(Replay, OutageIsBridgedByTheBuffer)
{
    ReplayConfig c;
    c.buffer_capacity = 16;
    c.link_up = [](std::size_t i) { return i < 40 || i >= 50; };
    const auto r = replay(short_trip(), c);
    ASSERT_EQ(r.server_samples.size(), 100u);
    for (std::size_t i = 0; i < 100; ++i) EXPECT_EQ(r.server_samples[i].seq, i + 1);
    EXPECT_EQ(r.dropped, 0u);
}

TEST(Replay, UndersizedBufferDropsOldest)
{
    ReplayConfig c;
    c.buffer_capacity = 4;
    c.link_up = [](std::size_t i) { return i < 40 || i >= 50; };
    const auto r = replay(short_trip(), c);
    EXPECT_EQ(r.dropped, 6u);
    EXPECT_EQ(r.server_samples.size(), 94u);
    // the newest samples of the outage survive
    EXPECT_EQ(r.server_samples[39].seq, 40u);
    EXPECT_EQ(r.server_samples[40].seq, 47u);
}

TEST(Replay, IntoALogStore)
{
    testutil::TempDir dir;
    {
        server::LogStore log(dir.path());
        ReplayConfig c;
        c.store = &log;
        c.vehicle_id = "logged";
        replay(short_trip(), c);
    }
    server::LogStore reopened(dir.path());
    EXPECT_EQ(reopened.query("logged", server::kTimeMin, server::kTimeMax).size(), 100u);
}
