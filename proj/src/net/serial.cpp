#include "obdfleet/net/serial.hpp"

#include "obdfleet/error.hpp"

#include <cerrno>
#include <climits>
#include <cstring>
#include <fcntl.h>
#include <poll.h>
#include <stdlib.h>
#include <termios.h>
#include <unistd.h>

namespace obdfleet::net {

namespace {

std::string errno_text(const std::string& what)
{
    return what + ": " + std::strerror(errno);
}

void make_raw(int fd, const std::string& what)
{
    termios tio{};
    if (::tcgetattr(fd, &tio) < 0) throw Error(Errc::LinkDown, errno_text("tcgetattr " + what));
    ::cfmakeraw(&tio);
    if (::tcsetattr(fd, TCSANOW, &tio) < 0) throw Error(Errc::LinkDown, errno_text("tcsetattr " + what));
}

} // namespace

std::unique_ptr<SerialStream> SerialStream::open(const std::filesystem::path& device)
{
    FileDescriptor fd(::open(device.c_str(), O_RDWR | O_NOCTTY | O_CLOEXEC));
    if (!fd) throw Error(Errc::LinkDown, errno_text("open " + device.string()));
    make_raw(fd.get(), device.string());
    return std::make_unique<SerialStream>(std::move(fd));
}

void SerialStream::write(std::string_view bytes)
{
    while (!bytes.empty()) {
        const auto n = ::write(fd_.get(), bytes.data(), bytes.size());
        if (n < 0) {
            if (errno == EINTR) continue;
            throw Error(Errc::LinkDown, errno_text("write"));
        }
        bytes.remove_prefix(static_cast<std::size_t>(n));
    }
}

std::optional<std::string> SerialStream::read_some(std::chrono::milliseconds timeout)
{
    pollfd p{fd_.get(), POLLIN, 0};
    int rc;
    while ((rc = ::poll(&p, 1, static_cast<int>(timeout.count()))) < 0 && errno == EINTR) {
    }
    if (rc < 0) throw Error(Errc::LinkDown, errno_text("poll"));
    if (rc == 0) return std::nullopt;
    char buf[4096];
    for (;;) {
        const auto n = ::read(fd_.get(), buf, sizeof buf);
        if (n < 0 && errno == EINTR) continue;
        // EIO is how a pty reports that the other side has gone.
        if (n < 0) throw Error(Errc::LinkDown, errno_text("read"));
        if (n == 0) throw Error(Errc::LinkDown, "device closed");
        return std::string(buf, static_cast<std::size_t>(n));
    }
}

PseudoTerminal::PseudoTerminal(std::filesystem::path link_path) : link_(std::move(link_path))
{
    FileDescriptor master(::posix_openpt(O_RDWR | O_NOCTTY | O_CLOEXEC));
    if (!master) throw Error(Errc::LinkDown, errno_text("posix_openpt"));
    if (::grantpt(master.get()) < 0 || ::unlockpt(master.get()) < 0) {
        throw Error(Errc::LinkDown, errno_text("unlockpt"));
    }
    char name[PATH_MAX];
    if (::ptsname_r(master.get(), name, sizeof name) != 0) throw Error(Errc::LinkDown, errno_text("ptsname"));
    slave_name_ = name;

    slave_ = FileDescriptor(::open(name, O_RDWR | O_NOCTTY | O_CLOEXEC));
    if (!slave_) throw Error(Errc::LinkDown, errno_text(std::string("open ") + name));
    make_raw(slave_.get(), slave_name_);
    master_ = std::make_unique<SerialStream>(std::move(master));

    std::error_code ec;
    if (std::filesystem::is_symlink(std::filesystem::symlink_status(link_, ec))) std::filesystem::remove(link_, ec);
    std::filesystem::create_symlink(slave_name_, link_, ec);
    if (ec) throw Error(Errc::LinkDown, "cannot create " + link_.string() + ": " + ec.message());
}

PseudoTerminal::~PseudoTerminal()
{
    std::error_code ec;
    std::filesystem::remove(link_, ec);
}

} // namespace obdfleet::net
