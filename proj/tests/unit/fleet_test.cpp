#include "obdfleet/server/fleet.hpp"

#include "test_util.hpp"

using namespace obdfleet;
using namespace obdfleet::server;

namespace {

TelemetrySample sample(const std::string& id, std::uint64_t seq, double speed, bool with_fix = true)
{
    TelemetrySample s;
    s.vehicle_id = id;
    s.seq = seq;
    s.timestamp_ms = 1'000'000 + static_cast<std::int64_t>(seq) * 1000;
    s.speed_kmh = speed;
    s.maf_gs = 3.85 + 0.25 * speed;
    s.fuel_l_per_km = metrics::fuel_consumption(s.maf_gs, speed, metrics::FuelModel::petrol());
    s.cumulative_distance_km = static_cast<double>(seq) * speed / 3600;
    if (with_fix) s.fix = nmea::GeoFix{52.0 + static_cast<double>(seq) * 1e-4, 0.12, nmea::UtcTime{1000}, nmea::FixStatus::Valid};
    return s;
}

struct Fleet {
    MemoryStore store;
    std::int64_t now = 42;
    Ingestor ingestor{store, [this] { return now; }};
    FleetQueries queries{store};
};

} // namespace

TEST(Ingestor, AcksStoresAndDeduplicates)
{
    Fleet f;
    const auto line = to_wire(sample("a", 1, 20));
    EXPECT_EQ(f.ingestor.ingest(line), "ACK 1");
    EXPECT_EQ(f.ingestor.ingest(line), "ACK 1");
    EXPECT_EQ(f.store.size(), 1u);
    EXPECT_EQ(f.ingestor.duplicates(), 1u);
    EXPECT_EQ(f.store.query("a", kTimeMin, kTimeMax)[0].received_at_ms, 42);
}

TEST(Ingestor, GarbageIsNakedAndDoesNotPoisonLaterLines)
{
    Fleet f;
    EXPECT_EQ(f.ingestor.ingest("garbage"), "NAK");
    EXPECT_EQ(f.ingestor.ingest("{\"seq\":1}"), "NAK");
    EXPECT_EQ(f.ingestor.ingest(to_wire(sample("a", 2, 20))), "ACK 2");
}

TEST(Ingestor, IngestingTwiceEqualsIngestingOnce)
{
    Fleet once, twice;
    for (std::uint64_t s = 1; s <= 50; ++s) {
        once.ingestor.ingest(to_wire(sample("a", s, 10)));
        twice.ingestor.ingest(to_wire(sample("a", s, 10)));
        twice.ingestor.ingest(to_wire(sample("a", (s * 7) % s + 1, 10)));
    }
    for (std::uint64_t s = 1; s <= 50; ++s) twice.ingestor.ingest(to_wire(sample("a", s, 10)));
    EXPECT_EQ(once.store.query("a", kTimeMin, kTimeMax), twice.store.query("a", kTimeMin, kTimeMax));
}

TEST(FleetQueries, SamplesAndRanges)
{
    Fleet f;
    for (std::uint64_t s = 1; s <= 10; ++s) f.ingestor.ingest(to_wire(sample("a", s, 30)));
    EXPECT_EQ(f.queries.query_samples("a", kTimeMin, kTimeMax).size(), 10u);
    EXPECT_EQ(f.queries.query_samples("a", 1'003'000, 1'005'000).size(), 3u);
    EXPECT_TRUE(f.queries.query_samples("a", 0, 10).empty());
    EXPECT_ERRC(f.queries.query_samples("a", 5, 4), Errc::InvalidRange);
    EXPECT_ERRC(f.queries.query_samples("b", kTimeMin, kTimeMax), Errc::UnknownVehicle);
}

TEST(FleetQueries, SummaryIsSummarizeTripOverTheQuery)
{
    Fleet f;
    for (std::uint64_t s = 1; s <= 10; ++s) f.ingestor.ingest(to_wire(sample("a", s, static_cast<double>(s * 3))));
    const auto samples = f.queries.query_samples("a", kTimeMin, kTimeMax);
    EXPECT_EQ(f.queries.trip_summary("a", kTimeMin, kTimeMax), metrics::summarize_trip(samples));
    EXPECT_EQ(f.queries.trip_summary("a", kTimeMin, kTimeMax, 0.5), metrics::summarize_trip(samples, 0.5));

    const auto one = f.queries.trip_summary("a", 1'004'000, 1'004'000);
    EXPECT_EQ(one.sample_count, 1u);
    EXPECT_EQ(one.max_speed_kmh, 12);
    EXPECT_ERRC(f.queries.trip_summary("a", 0, 10), Errc::EmptyTrip);
}

TEST(FleetQueries, LatestPositionSkipsVoidFixes)
{
    Fleet f;
    for (std::uint64_t s = 1; s <= 5; ++s) f.ingestor.ingest(to_wire(sample("a", s, 10)));
    for (std::uint64_t s = 6; s <= 8; ++s) {
        auto v = sample("a", s, 10);
        v.fix->status = nmea::FixStatus::Void;
        f.ingestor.ingest(to_wire(v));
    }
    f.ingestor.ingest(to_wire(sample("nogps", 1, 10, false)));
    f.ingestor.ingest(to_wire(sample("b", 3, 10)));

    const auto pos = f.queries.latest_position("a");
    EXPECT_EQ(pos.seq, 5u);
    EXPECT_NEAR(pos.fix.latitude, 52.0005, 1e-12);
    EXPECT_EQ(f.queries.latest_position("b").seq, 3u);
    EXPECT_ERRC(f.queries.latest_position("nogps"), Errc::NoFixAvailable);
    EXPECT_ERRC(f.queries.latest_position("zzz"), Errc::UnknownVehicle);
}

TEST(Export, CsvLayoutAndNullRule)
{
    std::vector<TelemetrySample> rows = {sample("a", 1, 0, false), sample("a", 2, 50)};
    const auto csv = samples_to_csv(rows);
    EXPECT_TRUE(csv.starts_with("seq,timestamp,speed_kmh,maf_gs,fuel_l_per_km,cumulative_distance_km,lat,lon\n"));
    EXPECT_NE(csv.find("\n1,1001000,0,3.85,,0,,\n"), std::string::npos) << csv;
    EXPECT_EQ(samples_to_csv({}), std::string(kCsvHeader) + "\n");
}

TEST(Export, CsvRoundTrip)
{
    std::vector<TelemetrySample> rows;
    for (std::uint64_t s = 1; s <= 200; ++s) rows.push_back(sample("a", s, static_cast<double>(s % 40), s % 3 != 0));
    auto back = samples_from_csv(samples_to_csv(rows), "a");
    ASSERT_EQ(back.size(), rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        auto want = rows[i];
        if (want.fix) want.fix->utc_time = {}; // not an exported column
        ASSERT_EQ(back[i], want) << i;
    }
    EXPECT_TRUE(samples_from_csv(samples_to_csv({}), "a").empty());
    EXPECT_ERRC(samples_from_csv("seq,timestamp\n1,2\n", "a"), Errc::MalformedRecord);
    EXPECT_ERRC(samples_from_csv(std::string(kCsvHeader) + "\n1,2,3\n", "a"), Errc::MalformedRecord);
}

TEST(Export, JsonRoundTrip)
{
    Fleet f;
    for (std::uint64_t s = 1; s <= 20; ++s) f.ingestor.ingest(to_wire(sample("a", s, 25, s % 2 == 0)));
    const auto original = f.queries.query_samples("a", kTimeMin, kTimeMax);
    EXPECT_EQ(samples_from_json(f.queries.export_json("a", kTimeMin, kTimeMax)), original);
    EXPECT_EQ(f.queries.export_csv("a", 0, 1), std::string(kCsvHeader) + "\n");
    EXPECT_ERRC(samples_from_json("{}"), Errc::MalformedRecord);
}
