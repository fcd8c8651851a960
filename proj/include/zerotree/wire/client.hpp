#pragma once

// Client-side view of the server. TcpClient speaks the framed protocol
// over a socket; LocalClient runs the same frames against an in-process
// ObjectStore (tests, benchmarks). Neither is safe for concurrent use;
// one connection per client thread of control.

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "zerotree/wire/protocol.hpp"

namespace zerotree::wire {

struct TransportStats {
    std::uint64_t exchanges = 0;
    std::uint64_t bytes_sent = 0;
    std::uint64_t bytes_received = 0;
};

class Client {
public:
    virtual ~Client() = default;

    // One request frame, one response frame, regardless of list length.
    virtual std::vector<FetchedObject> get_objects(const std::vector<ObjectId>& oids) = 0;

    // Throws ConflictError with the first mismatched oid.
    virtual CommitAck commit(const CommitBatch& batch) = 0;

    virtual std::optional<ObjectId> get_root(const std::string& index_name) = 0;

    virtual const TransportStats& stats() const = 0;
};

class TcpClient : public Client {
public:
    TcpClient(const std::string& host, std::uint16_t port);
    ~TcpClient() override;

    std::vector<FetchedObject> get_objects(const std::vector<ObjectId>& oids) override;
    CommitAck commit(const CommitBatch& batch) override;
    std::optional<ObjectId> get_root(const std::string& index_name) override;
    const TransportStats& stats() const override { return stats_; }

private:
    Bytes exchange(std::uint8_t type, BytesView payload, std::uint8_t expected_resp);

    int fd_ = -1;
    TransportStats stats_;
};

class ObjectStore;

class LocalClient : public Client {
public:
    explicit LocalClient(ObjectStore& store) : store_(store) {}

    std::vector<FetchedObject> get_objects(const std::vector<ObjectId>& oids) override;
    CommitAck commit(const CommitBatch& batch) override;
    std::optional<ObjectId> get_root(const std::string& index_name) override;
    const TransportStats& stats() const override { return stats_; }

private:
    Bytes exchange(std::uint8_t type, BytesView payload, std::uint8_t expected_resp);

    ObjectStore& store_;
    TransportStats stats_;
};

}  // namespace zerotree::wire
