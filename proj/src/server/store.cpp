#include "obdfleet/server/store.hpp"

#include "obdfleet/error.hpp"

#include <json.hpp>

#include <algorithm>
#include <cctype>
#include <cerrno>
#include <cstring>
#include <fcntl.h>
#include <fstream>
#include <sys/stat.h>
#include <unistd.h>

namespace obdfleet::server {

namespace {

std::string errno_text(const std::string& what)
{
    return what + ": " + std::strerror(errno);
}

void write_all(int fd, std::string_view bytes)
{
    while (!bytes.empty()) {
        const auto n = ::write(fd, bytes.data(), bytes.size());
        if (n < 0) {
            if (errno == EINTR) continue;
            throw Error(Errc::StorageFailure, errno_text("write"));
        }
        bytes.remove_prefix(static_cast<std::size_t>(n));
    }
}

} // namespace

std::string encode_stored(const StoredSample& s)
{
    auto j = nlohmann::json::parse(to_wire(s.sample));
    j["received_at"] = s.received_at_ms;
    return j.dump();
}

StoredSample decode_stored(std::string_view line)
{
    StoredSample s;
    s.sample = from_wire(line);
    try {
        const auto j = nlohmann::json::parse(line);
        s.received_at_ms = j.at("received_at").get<std::int64_t>();
    } catch (const nlohmann::json::exception& e) {
        throw Error(Errc::MalformedRecord, e.what());
    }
    return s;
}

// ---- MemoryStore ----

bool MemoryStore::append(const StoredSample& s)
{
    std::unique_lock lock(mutex_);
    auto& stream = streams_[s.sample.vehicle_id];
    const auto seq = s.sample.seq;
    if (!stream.by_seq.emplace(seq, s).second) return false;
    ++count_;

    auto& rec = stream.record;
    rec.vehicle_id = s.sample.vehicle_id;
    if (seq >= rec.last_seq || stream.by_seq.size() == 1) {
        rec.last_seq = seq;
        rec.last_seen_ms = s.received_at_ms;
    }
    if (s.sample.fix && s.sample.fix->valid() && (!stream.fix_seq || seq > *stream.fix_seq)) {
        stream.fix_seq = seq;
        rec.latest_fix = s.sample.fix;
    }
    return true;
}

std::vector<StoredSample> MemoryStore::query(const std::string& vehicle_id, std::int64_t t0, std::int64_t t1) const
{
    std::shared_lock lock(mutex_);
    const auto it = streams_.find(vehicle_id);
    if (it == streams_.end()) throw Error(Errc::UnknownVehicle, "no samples for vehicle '" + vehicle_id + "'");
    std::vector<StoredSample> out;
    for (const auto& [seq, s] : it->second.by_seq) {
        if (s.sample.timestamp_ms >= t0 && s.sample.timestamp_ms <= t1) out.push_back(s);
    }
    return out;
}

std::optional<VehicleRecord> MemoryStore::vehicle(const std::string& vehicle_id) const
{
    std::shared_lock lock(mutex_);
    const auto it = streams_.find(vehicle_id);
    if (it == streams_.end()) return std::nullopt;
    return it->second.record;
}

std::vector<VehicleRecord> MemoryStore::vehicles() const
{
    std::shared_lock lock(mutex_);
    std::vector<VehicleRecord> out;
    out.reserve(streams_.size());
    for (const auto& [id, stream] : streams_) out.push_back(stream.record);
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.vehicle_id < b.vehicle_id; });
    return out;
}

std::optional<StoredSample> MemoryStore::latest_valid_fix(const std::string& vehicle_id) const
{
    std::shared_lock lock(mutex_);
    const auto it = streams_.find(vehicle_id);
    if (it == streams_.end()) throw Error(Errc::UnknownVehicle, "no samples for vehicle '" + vehicle_id + "'");
    if (!it->second.fix_seq) return std::nullopt;
    return it->second.by_seq.at(*it->second.fix_seq);
}

std::size_t MemoryStore::size() const
{
    std::shared_lock lock(mutex_);
    return count_;
}

bool MemoryStore::contains(const std::string& vehicle_id, std::uint64_t seq) const
{
    std::shared_lock lock(mutex_);
    const auto it = streams_.find(vehicle_id);
    return it != streams_.end() && it->second.by_seq.contains(seq);
}

// ---- LogStore ----

std::string LogStore::log_file_name(const std::string& vehicle_id)
{
    static constexpr char hex[] = "0123456789ABCDEF";
    std::string name;
    for (unsigned char c : vehicle_id) {
        if (std::isalnum(c) || c == '-' || c == '_') {
            name.push_back(static_cast<char>(c));
        } else {
            name.push_back('%');
            name.push_back(hex[c >> 4]);
            name.push_back(hex[c & 0xF]);
        }
    }
    return name + ".log";
}

LogStore::LogStore(std::filesystem::path dir, bool sync) : dir_(std::move(dir)), sync_(sync)
{
    std::error_code ec;
    std::filesystem::create_directories(dir_, ec);
    if (ec) throw Error(Errc::StorageFailure, "cannot create " + dir_.string() + ": " + ec.message());
    for (const auto& entry : std::filesystem::directory_iterator(dir_)) {
        if (entry.is_regular_file() && entry.path().extension() == ".log") load_file(entry.path());
    }
}

LogStore::~LogStore()
{
    for (auto& [id, w] : writers_) {
        if (w->fd >= 0) ::close(w->fd);
    }
}

void LogStore::load_file(const std::filesystem::path& file)
{
    std::ifstream in(file, std::ios::binary);
    if (!in) throw Error(Errc::StorageFailure, "cannot read " + file.string());
    std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());

    std::size_t pos = 0;
    while (pos < content.size()) {
        const auto nl = content.find('\n', pos);
        if (nl == std::string::npos) {
            // Torn tail from an interrupted append: it was never acknowledged.
            std::filesystem::resize_file(file, pos);
            break;
        }
        const auto line = std::string_view(content).substr(pos, nl - pos);
        try {
            index_.append(decode_stored(line));
        } catch (const Error&) {
            throw Error(Errc::StorageFailure, file.string() + ": corrupt record at byte " + std::to_string(pos));
        }
        pos = nl + 1;
    }
}

LogStore::Writer& LogStore::writer_for(const std::string& vehicle_id)
{
    std::lock_guard lock(writers_mutex_);
    auto& w = writers_[vehicle_id];
    if (!w) w = std::make_unique<Writer>();
    return *w;
}

bool LogStore::append(const StoredSample& s)
{
    auto& w = writer_for(s.sample.vehicle_id);
    std::lock_guard lock(w.mutex);
    if (index_.contains(s.sample.vehicle_id, s.sample.seq)) return false;

    if (w.fd < 0) {
        const auto path = dir_ / log_file_name(s.sample.vehicle_id);
        w.fd = ::open(path.c_str(), O_WRONLY | O_CREAT | O_APPEND | O_CLOEXEC, 0644);
        if (w.fd < 0) throw Error(Errc::StorageFailure, errno_text("open " + path.string()));
        // Make the new directory entry durable too.
        if (const int dfd = ::open(dir_.c_str(), O_RDONLY | O_DIRECTORY | O_CLOEXEC); dfd >= 0) {
            if (sync_) ::fsync(dfd);
            ::close(dfd);
        }
    }

    const auto line = encode_stored(s) + '\n';
    const auto end = ::lseek(w.fd, 0, SEEK_END);
    try {
        if (fault_hook_) fault_hook_(FaultPoint::BeforeWrite);
        if (fault_hook_) {
            const auto half = line.size() / 2;
            write_all(w.fd, std::string_view(line).substr(0, half));
            fault_hook_(FaultPoint::MidWrite);
            write_all(w.fd, std::string_view(line).substr(half));
        } else {
            write_all(w.fd, line);
        }
        if (fault_hook_) fault_hook_(FaultPoint::BeforeSync);
        if (sync_ && ::fdatasync(w.fd) < 0) throw Error(Errc::StorageFailure, errno_text("fdatasync"));
    } catch (...) {
        // Leave no partial record behind for the next append to land after.
        if (end >= 0 && ::ftruncate(w.fd, end) < 0) {
            // nothing more to do; reopen will truncate the torn tail
        }
        throw;
    }
    if (fault_hook_) fault_hook_(FaultPoint::AfterSync);

    index_.append(s);
    return true;
}

} // namespace obdfleet::server
