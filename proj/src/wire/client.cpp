#include "zerotree/wire/client.hpp"

#include <arpa/inet.h>
#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>

#include "zerotree/errors.hpp"
#include "zerotree/wire/store.hpp"

namespace zerotree::wire {

TcpClient::TcpClient(const std::string& host, std::uint16_t port) {
    addrinfo hints{};
    hints.ai_family = AF_INET;
    hints.ai_socktype = SOCK_STREAM;
    addrinfo* res = nullptr;
    if (::getaddrinfo(host.c_str(), std::to_string(port).c_str(), &hints, &res) != 0 || !res)
        throw TransportError("cannot resolve " + host);

    fd_ = ::socket(res->ai_family, res->ai_socktype, res->ai_protocol);
    if (fd_ < 0) {
        ::freeaddrinfo(res);
        throw TransportError("socket: " + std::string(std::strerror(errno)));
    }
    if (::connect(fd_, res->ai_addr, res->ai_addrlen) != 0) {
        std::string err = std::strerror(errno);
        ::freeaddrinfo(res);
        ::close(fd_);
        fd_ = -1;
        throw TransportError("connect " + host + ":" + std::to_string(port) + ": " + err);
    }
    ::freeaddrinfo(res);
    int one = 1;
    ::setsockopt(fd_, IPPROTO_TCP, TCP_NODELAY, &one, sizeof(one));
}

TcpClient::~TcpClient() {
    if (fd_ >= 0) ::close(fd_);
}

Bytes TcpClient::exchange(std::uint8_t type, BytesView payload, std::uint8_t expected_resp) {
    Bytes out = frame(type, payload);

    size_t sent = 0;
    while (sent < out.size()) {
        ssize_t w = ::send(fd_, out.data() + sent, out.size() - sent, MSG_NOSIGNAL);
        if (w < 0) {
            if (errno == EINTR) continue;
            throw TransportError("send failed: " + std::string(std::strerror(errno)));
        }
        sent += static_cast<size_t>(w);
    }

    auto read_exact = [&](std::uint8_t* buf, size_t n) {
        size_t got = 0;
        while (got < n) {
            ssize_t r = ::recv(fd_, buf + got, n - got, 0);
            if (r == 0) throw TransportError("server closed connection");
            if (r < 0) {
                if (errno == EINTR) continue;
                throw TransportError("recv failed: " + std::string(std::strerror(errno)));
            }
            got += static_cast<size_t>(r);
        }
    };

    std::uint8_t header[4];
    read_exact(header, 4);
    std::uint32_t len = 0;
    for (int i = 0; i < 4; ++i) len = (len << 8) | header[i];
    if (len == 0) throw TransportError("empty response frame");
    Bytes body(len);
    read_exact(body.data(), body.size());

    stats_.exchanges += 1;
    stats_.bytes_sent += out.size();
    stats_.bytes_received += 4 + body.size();

    std::uint8_t resp_type = body[0];
    Bytes resp_payload(body.begin() + 1, body.end());
    if (resp_type == kError) {
        ByteReader r(resp_payload);
        throw TransportError("server error: " + to_string(r.read_bytes()));
    }
    if (resp_type != expected_resp) throw TransportError("unexpected response type");
    return resp_payload;
}

std::vector<FetchedObject> TcpClient::get_objects(const std::vector<ObjectId>& oids) {
    return decode_get_objects_resp(exchange(kGetObjects, encode_get_objects(oids), kGetObjectsResp));
}

CommitAck TcpClient::commit(const CommitBatch& batch) {
    return decode_commit_resp(exchange(kCommit, encode_commit(batch), kCommitResp));
}

std::optional<ObjectId> TcpClient::get_root(const std::string& index_name) {
    return decode_get_root_resp(exchange(kGetRoot, encode_get_root(index_name), kGetRootResp));
}

// LocalClient pushes the same frames through handle_request so in-process
// sessions exercise the identical codec path as TCP ones.
Bytes LocalClient::exchange(std::uint8_t type, BytesView payload, std::uint8_t expected_resp) {
    Bytes request = frame(type, payload);
    auto [resp_type, resp_payload] =
        handle_request(store_, request[4], BytesView(request.data() + 5, request.size() - 5));
    Bytes response = frame(resp_type, resp_payload);

    stats_.exchanges += 1;
    stats_.bytes_sent += request.size();
    stats_.bytes_received += response.size();

    if (resp_type == kError) {
        ByteReader r(resp_payload);
        throw TransportError("server error: " + to_string(r.read_bytes()));
    }
    if (resp_type != expected_resp) throw TransportError("unexpected response type");
    return resp_payload;
}

std::vector<FetchedObject> LocalClient::get_objects(const std::vector<ObjectId>& oids) {
    return decode_get_objects_resp(exchange(kGetObjects, encode_get_objects(oids), kGetObjectsResp));
}

CommitAck LocalClient::commit(const CommitBatch& batch) {
    return decode_commit_resp(exchange(kCommit, encode_commit(batch), kCommitResp));
}

std::optional<ObjectId> LocalClient::get_root(const std::string& index_name) {
    return decode_get_root_resp(exchange(kGetRoot, encode_get_root(index_name), kGetRootResp));
}

}  // namespace zerotree::wire
