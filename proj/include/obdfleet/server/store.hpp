#pragma once

// Per-vehicle sample storage. Samples are keyed by (vehicle_id, seq) and
// never rewritten; a duplicate append is a no-op.

#include "obdfleet/telemetry.hpp"

#include <cstdint>
#include <filesystem>
#include <functional>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <unordered_map>
#include <vector>

namespace obdfleet::server {

struct StoredSample {
    TelemetrySample sample;
    std::int64_t received_at_ms = 0; // server clock

    friend bool operator==(const StoredSample&, const StoredSample&) = default;
};

struct VehicleRecord {
    std::string vehicle_id;
    std::uint64_t last_seq = 0;
    std::int64_t last_seen_ms = 0;
    std::optional<nmea::GeoFix> latest_fix; // from the highest-seq valid fix
};

inline constexpr std::int64_t kTimeMin = std::numeric_limits<std::int64_t>::min();
inline constexpr std::int64_t kTimeMax = std::numeric_limits<std::int64_t>::max();

class SampleStore {
public:
    virtual ~SampleStore() = default;

    /// Returns false for a duplicate (vehicle_id, seq). When it returns, the
    /// sample is durable. Throws Error(StorageFailure).
    virtual bool append(const StoredSample& s) = 0;

    /// Samples with t0 <= timestamp <= t1 in seq order. Throws UnknownVehicle.
    virtual std::vector<StoredSample> query(const std::string& vehicle_id, std::int64_t t0, std::int64_t t1) const = 0;

    virtual std::optional<VehicleRecord> vehicle(const std::string& vehicle_id) const = 0;
    virtual std::vector<VehicleRecord> vehicles() const = 0;

    /// Highest-seq sample carrying a valid fix.
    virtual std::optional<StoredSample> latest_valid_fix(const std::string& vehicle_id) const = 0;

    virtual std::size_t size() const = 0;
};

/// In-memory index; also the read side of LogStore.
class MemoryStore : public SampleStore {
public:
    bool append(const StoredSample& s) override;
    std::vector<StoredSample> query(const std::string& vehicle_id, std::int64_t t0, std::int64_t t1) const override;
    std::optional<VehicleRecord> vehicle(const std::string& vehicle_id) const override;
    std::vector<VehicleRecord> vehicles() const override;
    std::optional<StoredSample> latest_valid_fix(const std::string& vehicle_id) const override;
    std::size_t size() const override;

    bool contains(const std::string& vehicle_id, std::uint64_t seq) const;

private:
    struct Stream {
        std::map<std::uint64_t, StoredSample> by_seq;
        VehicleRecord record;
        std::optional<std::uint64_t> fix_seq;
    };

    mutable std::shared_mutex mutex_;
    std::unordered_map<std::string, Stream> streams_;
    std::size_t count_ = 0;
};

/// Append-only log file per vehicle under a data directory, fsync'd before
/// append() returns, with the index rebuilt from the files on open. A torn
/// final line left by a crash is truncated away on open.
class LogStore : public SampleStore {
public:
    enum class FaultPoint { BeforeWrite, MidWrite, BeforeSync, AfterSync };
    /// Test seam: invoked at each point of an append.
    using FaultHook = std::function<void(FaultPoint)>;

    explicit LogStore(std::filesystem::path dir, bool sync = true);
    ~LogStore() override;

    bool append(const StoredSample& s) override;
    std::vector<StoredSample> query(const std::string& vehicle_id, std::int64_t t0, std::int64_t t1) const override
    {
        return index_.query(vehicle_id, t0, t1);
    }
    std::optional<VehicleRecord> vehicle(const std::string& vehicle_id) const override
    {
        return index_.vehicle(vehicle_id);
    }
    std::vector<VehicleRecord> vehicles() const override { return index_.vehicles(); }
    std::optional<StoredSample> latest_valid_fix(const std::string& vehicle_id) const override
    {
        return index_.latest_valid_fix(vehicle_id);
    }
    std::size_t size() const override { return index_.size(); }

    void set_fault_hook(FaultHook hook) { fault_hook_ = std::move(hook); }

    const std::filesystem::path& directory() const noexcept { return dir_; }
    /// File name used for a vehicle's log (percent-encoded id + ".log").
    static std::string log_file_name(const std::string& vehicle_id);

private:
    struct Writer {
        std::mutex mutex; // serialises appends for one vehicle
        int fd = -1;
    };

    Writer& writer_for(const std::string& vehicle_id);
    void load_file(const std::filesystem::path& file);

    std::filesystem::path dir_;
    bool sync_;
    MemoryStore index_;
    std::mutex writers_mutex_;
    std::unordered_map<std::string, std::unique_ptr<Writer>> writers_;
    FaultHook fault_hook_;
};

/// One stored line of a LogStore file.
std::string encode_stored(const StoredSample& s);
StoredSample decode_stored(std::string_view line);

} // namespace obdfleet::server
