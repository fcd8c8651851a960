#include "zerotree/wire/server.hpp"

#include <arpa/inet.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>

#include "zerotree/errors.hpp"

namespace zerotree::wire {

namespace {

bool read_exact(int fd, std::uint8_t* buf, size_t n) {
    size_t got = 0;
    while (got < n) {
        ssize_t r = ::recv(fd, buf + got, n - got, 0);
        if (r == 0) return false;  // orderly close
        if (r < 0) {
            if (errno == EINTR) continue;
            return false;
        }
        got += static_cast<size_t>(r);
    }
    return true;
}

bool write_all(int fd, const std::uint8_t* buf, size_t n) {
    size_t sent = 0;
    while (sent < n) {
        ssize_t w = ::send(fd, buf + sent, n - sent, MSG_NOSIGNAL);
        if (w < 0) {
            if (errno == EINTR) continue;
            return false;
        }
        sent += static_cast<size_t>(w);
    }
    return true;
}

constexpr std::uint32_t kMaxFrame = 256u << 20;

}  // namespace

Server::Server(const std::string& host, std::uint16_t port, const std::string& store_path)
    : store_(std::make_unique<ObjectStore>(store_path)) {
    listen_fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
    if (listen_fd_ < 0) throw BindFailure("socket: " + std::string(std::strerror(errno)));

    int one = 1;
    ::setsockopt(listen_fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof(one));

    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_port = htons(port);
    if (host.empty() || host == "0.0.0.0") {
        addr.sin_addr.s_addr = INADDR_ANY;
    } else if (::inet_pton(AF_INET, host.c_str(), &addr.sin_addr) != 1) {
        ::close(listen_fd_);
        throw BindFailure("bad listen address " + host);
    }

    if (::bind(listen_fd_, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) != 0) {
        std::string err = std::strerror(errno);
        ::close(listen_fd_);
        listen_fd_ = -1;
        throw BindFailure("bind " + host + ":" + std::to_string(port) + ": " + err);
    }
    if (::listen(listen_fd_, 64) != 0) {
        std::string err = std::strerror(errno);
        ::close(listen_fd_);
        listen_fd_ = -1;
        throw BindFailure("listen: " + err);
    }

    sockaddr_in bound{};
    socklen_t len = sizeof(bound);
    ::getsockname(listen_fd_, reinterpret_cast<sockaddr*>(&bound), &len);
    port_ = ntohs(bound.sin_port);
}

Server::~Server() {
    stop();
}

void Server::run() {
    while (!stopping_.load()) {
        sockaddr_in peer{};
        socklen_t len = sizeof(peer);
        int fd = ::accept(listen_fd_, reinterpret_cast<sockaddr*>(&peer), &len);
        if (fd < 0) {
            if (stopping_.load()) break;
            if (errno == EINTR) continue;
            break;
        }
        int one = 1;
        ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof(one));
        std::lock_guard lock(sessions_mutex_);
        session_fds_.push_back(fd);
        sessions_.emplace_back([this, fd] { serve_connection(fd); });
    }
}

void Server::start() {
    accept_thread_ = std::thread([this] { run(); });
}

void Server::stop() {
    if (stopping_.exchange(true)) return;
    if (listen_fd_ >= 0) {
        ::shutdown(listen_fd_, SHUT_RDWR);
        ::close(listen_fd_);
        listen_fd_ = -1;
    }
    if (accept_thread_.joinable()) accept_thread_.join();
    std::lock_guard lock(sessions_mutex_);
    for (int fd : session_fds_) ::shutdown(fd, SHUT_RDWR);
    for (auto& t : sessions_)
        if (t.joinable()) t.join();
    sessions_.clear();
    session_fds_.clear();
}

void Server::serve_connection(int fd) {
    for (;;) {
        std::uint8_t header[4];
        if (!read_exact(fd, header, 4)) break;
        std::uint32_t len = 0;
        for (int i = 0; i < 4; ++i) len = (len << 8) | header[i];
        if (len == 0 || len > kMaxFrame) break;

        Bytes body(len);
        if (!read_exact(fd, body.data(), body.size())) break;

        auto [resp_type, resp_payload] =
            handle_request(*store_, body[0], BytesView(body.data() + 1, body.size() - 1));
        Bytes out = frame(resp_type, resp_payload);
        if (!write_all(fd, out.data(), out.size())) break;
    }
    ::close(fd);
}

}  // namespace zerotree::wire
