#pragma once

#include <arpa/inet.h>
#include <netinet/in.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>

#include "saccade/serve.hpp"

namespace saccade {

/// Owning file descriptor.
class Socket {
public:
    Socket() = default;
    explicit Socket(int fd) : fd_(fd) {}
    Socket(Socket&& o) noexcept : fd_(std::exchange(o.fd_, -1)) {}
    Socket& operator=(Socket&& o) noexcept
    {
        if (this != &o) {
            reset();
            fd_ = std::exchange(o.fd_, -1);
        }
        return *this;
    }
    Socket(const Socket&) = delete;
    Socket& operator=(const Socket&) = delete;
    ~Socket() { reset(); }

    int fd() const noexcept { return fd_; }
    bool valid() const noexcept { return fd_ >= 0; }

    void reset()
    {
        if (fd_ >= 0) ::close(fd_);
        fd_ = -1;
    }

private:
    int fd_ = -1;
};

/// Buffered newline splitter over a connected socket.
class SocketLineReader {
public:
    explicit SocketLineReader(int fd) : fd_(fd) {}

    std::optional<std::string> next()
    {
        for (;;) {
            const auto nl = buffer_.find('\n');
            if (nl != std::string::npos) {
                std::string line = buffer_.substr(0, nl);
                buffer_.erase(0, nl + 1);
                return line;
            }
            char chunk[4096];
            const ssize_t n = ::recv(fd_, chunk, sizeof chunk, 0);
            if (n < 0 && errno == EINTR) continue;
            if (n <= 0) {
                if (buffer_.empty()) return std::nullopt;
                return std::exchange(buffer_, {});
            }
            buffer_.append(chunk, static_cast<std::size_t>(n));
        }
    }

private:
    int fd_;
    std::string buffer_;
};

inline bool send_all(int fd, std::string_view data)
{
    while (!data.empty()) {
        const ssize_t n = ::send(fd, data.data(), data.size(), MSG_NOSIGNAL);
        if (n < 0 && errno == EINTR) continue;
        if (n <= 0) return false;
        data.remove_prefix(static_cast<std::size_t>(n));
    }
    return true;
}

/// Listening socket on 127.0.0.1 (or any address); port 0 picks an ephemeral port.
inline Socket listen_tcp(int port, bool loopback_only = false)
{
    Socket s(::socket(AF_INET, SOCK_STREAM, 0));
    if (!s.valid()) throw std::runtime_error(std::string("socket: ") + std::strerror(errno));
    const int one = 1;
    ::setsockopt(s.fd(), SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_port = htons(static_cast<std::uint16_t>(port));
    addr.sin_addr.s_addr = htonl(loopback_only ? INADDR_LOOPBACK : INADDR_ANY);
    if (::bind(s.fd(), reinterpret_cast<sockaddr*>(&addr), sizeof addr) != 0) {
        throw std::runtime_error("bind port " + std::to_string(port) + ": " + std::strerror(errno));
    }
    if (::listen(s.fd(), 4) != 0) throw std::runtime_error(std::string("listen: ") + std::strerror(errno));
    return s;
}

inline int bound_port(const Socket& s)
{
    sockaddr_in addr{};
    socklen_t len = sizeof addr;
    ::getsockname(s.fd(), reinterpret_cast<sockaddr*>(&addr), &len);
    return ntohs(addr.sin_port);
}

inline Socket connect_tcp(const std::string& host, int port)
{
    Socket s(::socket(AF_INET, SOCK_STREAM, 0));
    if (!s.valid()) throw std::runtime_error(std::string("socket: ") + std::strerror(errno));
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_port = htons(static_cast<std::uint16_t>(port));
    if (::inet_pton(AF_INET, host.c_str(), &addr.sin_addr) != 1) throw std::runtime_error("bad address " + host);
    if (::connect(s.fd(), reinterpret_cast<sockaddr*>(&addr), sizeof addr) != 0) {
        throw std::runtime_error("connect: " + std::string(std::strerror(errno)));
    }
    return s;
}

/**
 * Accepts connections one at a time; each gets a fresh agent and a serve_lines session.
 * Stops after `max_connections` sessions (0 = never). Throws if the port cannot be bound.
 */
inline ServeStats serve_tcp(Socket listener, const AgentConfig& cfg, const ServeOptions& opts = {},
                            const WarningSink& warn = {}, std::size_t max_connections = 0)
{
    ServeStats total;
    for (std::size_t served = 0; max_connections == 0 || served < max_connections; ++served) {
        Socket conn(::accept(listener.fd(), nullptr, nullptr));
        if (!conn.valid()) {
            if (errno == EINTR) continue;
            throw std::runtime_error(std::string("accept: ") + std::strerror(errno));
        }
        SocketLineReader reader(conn.fd());
        const ServeStats s = serve_lines([&reader] { return reader.next(); },
                                         [&conn](const std::string& action) { send_all(conn.fd(), action + "\n"); },
                                         cfg, opts, warn);
        total.frames += s.frames;
        total.actions += s.actions;
        total.malformed += s.malformed;
    }
    return total;
}

} // namespace saccade
