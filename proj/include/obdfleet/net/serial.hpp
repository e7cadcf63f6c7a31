#pragma once

// Character-device transport: a raw-mode tty on the client side and a
// pseudo-terminal pair on the emulator side, so tools that expect a serial
// OBD adapter can be pointed at the emulator.

#include "obdfleet/net/tcp.hpp"

#include <filesystem>

namespace obdfleet::net {

class SerialStream final : public ByteStream {
public:
    explicit SerialStream(FileDescriptor fd) : fd_(std::move(fd)) {}

    /// Opens a tty and puts it in raw mode. Throws Error(LinkDown).
    static std::unique_ptr<SerialStream> open(const std::filesystem::path& device);

    void write(std::string_view bytes) override;
    std::optional<std::string> read_some(std::chrono::milliseconds timeout) override;

private:
    FileDescriptor fd_;
};

/// Pseudo-terminal whose slave side is published as a symlink at
/// `link_path` for the lifetime of this object. The slave stays open here so
/// clients may come and go without the master seeing a hangup.
class PseudoTerminal {
public:
    explicit PseudoTerminal(std::filesystem::path link_path);
    ~PseudoTerminal();
    PseudoTerminal(const PseudoTerminal&) = delete;
    PseudoTerminal& operator=(const PseudoTerminal&) = delete;

    SerialStream& master() noexcept { return *master_; }
    const std::filesystem::path& link_path() const noexcept { return link_; }
    const std::string& slave_name() const noexcept { return slave_name_; }

private:
    std::unique_ptr<SerialStream> master_;
    FileDescriptor slave_;
    std::string slave_name_;
    std::filesystem::path link_;
};

/// True when an --obd / --listen argument names a device path rather than
/// host:port.
inline bool is_device_path(std::string_view address)
{
    return address.find('/') != std::string_view::npos;
}

} // namespace obdfleet::net
