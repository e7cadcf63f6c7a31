#include "obdfleet/net/tcp.hpp"

#include "obdfleet/error.hpp"

#include <arpa/inet.h>
#include <cerrno>
#include <charconv>
#include <cstring>
#include <fcntl.h>
#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <poll.h>
#include <stdexcept>
#include <sys/socket.h>
#include <unistd.h>

namespace obdfleet::net {

namespace {

std::string errno_text(const char* what)
{
    return std::string(what) + ": " + std::strerror(errno);
}

sockaddr_in resolve(const Endpoint& ep)
{
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_port = htons(ep.port);
    const std::string host = ep.host.empty() || ep.host == "localhost" ? "127.0.0.1" : ep.host;
    if (inet_pton(AF_INET, host.c_str(), &addr.sin_addr) == 1) return addr;

    addrinfo hints{};
    hints.ai_family = AF_INET;
    hints.ai_socktype = SOCK_STREAM;
    addrinfo* res = nullptr;
    if (getaddrinfo(host.c_str(), nullptr, &hints, &res) != 0 || !res) {
        throw Error(Errc::LinkDown, "cannot resolve host " + host);
    }
    addr.sin_addr = reinterpret_cast<sockaddr_in*>(res->ai_addr)->sin_addr;
    freeaddrinfo(res);
    return addr;
}

int wait_for(int fd, short events, std::chrono::milliseconds timeout)
{
    pollfd p{fd, events, 0};
    for (;;) {
        const int rc = ::poll(&p, 1, static_cast<int>(timeout.count()));
        if (rc < 0 && errno == EINTR) continue;
        return rc;
    }
}

} // namespace

Endpoint Endpoint::parse(std::string_view text)
{
    const auto colon = text.rfind(':');
    if (colon == std::string_view::npos) throw std::invalid_argument("endpoint must be host:port");
    Endpoint ep;
    if (colon > 0) ep.host = std::string(text.substr(0, colon));
    const auto port_text = text.substr(colon + 1);
    unsigned port = 0;
    auto [ptr, ec] = std::from_chars(port_text.data(), port_text.data() + port_text.size(), port);
    if (port_text.empty() || ec != std::errc{} || ptr != port_text.data() + port_text.size() || port > 65535) {
        throw std::invalid_argument("bad port in endpoint '" + std::string(text) + "'");
    }
    ep.port = static_cast<std::uint16_t>(port);
    return ep;
}

std::string Endpoint::to_string() const
{
    return host + ":" + std::to_string(port);
}

FileDescriptor& FileDescriptor::operator=(FileDescriptor&& other) noexcept
{
    if (this != &other) {
        reset();
        fd_ = other.release();
    }
    return *this;
}

int FileDescriptor::release() noexcept
{
    const int fd = fd_;
    fd_ = -1;
    return fd;
}

void FileDescriptor::reset() noexcept
{
    if (fd_ >= 0) ::close(fd_);
    fd_ = -1;
}

std::unique_ptr<TcpStream> TcpStream::connect(const Endpoint& ep, std::chrono::milliseconds timeout)
{
    const auto addr = resolve(ep);
    FileDescriptor fd(::socket(AF_INET, SOCK_STREAM | SOCK_CLOEXEC | SOCK_NONBLOCK, 0));
    if (!fd) throw Error(Errc::LinkDown, errno_text("socket"));

    if (::connect(fd.get(), reinterpret_cast<const sockaddr*>(&addr), sizeof addr) < 0) {
        if (errno != EINPROGRESS) throw Error(Errc::LinkDown, errno_text(("connect " + ep.to_string()).c_str()));
        if (wait_for(fd.get(), POLLOUT, timeout) <= 0) {
            throw Error(Errc::LinkDown, "connect " + ep.to_string() + ": timed out");
        }
        int err = 0;
        socklen_t len = sizeof err;
        ::getsockopt(fd.get(), SOL_SOCKET, SO_ERROR, &err, &len);
        if (err != 0) throw Error(Errc::LinkDown, "connect " + ep.to_string() + ": " + std::strerror(err));
    }
    const int flags = ::fcntl(fd.get(), F_GETFL);
    ::fcntl(fd.get(), F_SETFL, flags & ~O_NONBLOCK);
    const int one = 1;
    ::setsockopt(fd.get(), IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
    return std::make_unique<TcpStream>(std::move(fd));
}

void TcpStream::write(std::string_view bytes)
{
    while (!bytes.empty()) {
        const auto n = ::send(fd_.get(), bytes.data(), bytes.size(), MSG_NOSIGNAL);
        if (n < 0) {
            if (errno == EINTR) continue;
            throw Error(Errc::LinkDown, errno_text("send"));
        }
        bytes.remove_prefix(static_cast<std::size_t>(n));
    }
}

std::optional<std::string> TcpStream::read_some(std::chrono::milliseconds timeout)
{
    const int rc = wait_for(fd_.get(), POLLIN, timeout);
    if (rc < 0) throw Error(Errc::LinkDown, errno_text("poll"));
    if (rc == 0) return std::nullopt;
    char buf[4096];
    for (;;) {
        const auto n = ::recv(fd_.get(), buf, sizeof buf, 0);
        if (n < 0 && errno == EINTR) continue;
        if (n < 0) throw Error(Errc::LinkDown, errno_text("recv"));
        if (n == 0) throw Error(Errc::LinkDown, "peer closed the connection");
        return std::string(buf, static_cast<std::size_t>(n));
    }
}

void TcpStream::shutdown() noexcept
{
    ::shutdown(fd_.get(), SHUT_RDWR);
}

TcpListener::TcpListener(const Endpoint& ep)
{
    auto addr = resolve(ep);
    fd_ = FileDescriptor(::socket(AF_INET, SOCK_STREAM | SOCK_CLOEXEC, 0));
    if (!fd_) throw Error(Errc::LinkDown, errno_text("socket"));
    const int one = 1;
    ::setsockopt(fd_.get(), SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
    if (::bind(fd_.get(), reinterpret_cast<const sockaddr*>(&addr), sizeof addr) < 0) {
        throw Error(Errc::LinkDown, errno_text(("bind " + ep.to_string()).c_str()));
    }
    if (::listen(fd_.get(), 64) < 0) throw Error(Errc::LinkDown, errno_text("listen"));
    socklen_t len = sizeof addr;
    ::getsockname(fd_.get(), reinterpret_cast<sockaddr*>(&addr), &len);
    port_ = ntohs(addr.sin_port);
}

std::unique_ptr<TcpStream> TcpListener::accept(std::chrono::milliseconds timeout)
{
    if (wait_for(fd_.get(), POLLIN, timeout) <= 0) return nullptr;
    FileDescriptor fd(::accept4(fd_.get(), nullptr, nullptr, SOCK_CLOEXEC));
    if (!fd) return nullptr;
    const int one = 1;
    ::setsockopt(fd.get(), IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
    return std::make_unique<TcpStream>(std::move(fd));
}

std::unique_ptr<ByteStream> TcpConnector::connect()
{
    return TcpStream::connect(ep_, timeout_);
}

} // namespace obdfleet::net
