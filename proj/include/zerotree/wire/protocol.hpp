#pragma once

// Binary request/response protocol between client and server.
//
// Frame: 4-byte big-endian length || 1-byte message type || payload.
// Integers big-endian; lists as 4-byte count + elements; byte strings as
// 4-byte length + bytes. The server treats every blob as opaque.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "zerotree/bytes.hpp"

namespace zerotree::wire {

using ObjectId = std::uint64_t;
constexpr ObjectId kNullOid = 0;  // reserved null reference

enum MessageType : std::uint8_t {
    kGetObjects = 0x01,
    kCommit = 0x02,
    kGetRoot = 0x03,
    kGetObjectsResp = 0x81,
    kCommitResp = 0x82,
    kGetRootResp = 0x83,
    kError = 0xFF,
};

struct WriteOp {
    bool is_new = false;        // NEW entries carry no expected version
    ObjectId oid = kNullOid;    // ignored when is_new
    std::uint64_t expected_version = 0;
    Bytes blob;

    static WriteOp create(Bytes blob) {
        WriteOp op;
        op.is_new = true;
        op.blob = std::move(blob);
        return op;
    }
    static WriteOp overwrite(ObjectId oid, std::uint64_t expected_version, Bytes blob) {
        WriteOp op;
        op.oid = oid;
        op.expected_version = expected_version;
        op.blob = std::move(blob);
        return op;
    }
};

struct RootUpdate {
    std::string index_name;
    ObjectId root = kNullOid;
};

// All-or-nothing unit of change.
struct CommitBatch {
    std::vector<WriteOp> writes;
    std::vector<RootUpdate> root_updates;
    bool empty() const { return writes.empty() && root_updates.empty(); }
};

struct FetchedObject {
    ObjectId oid = kNullOid;
    bool found = false;
    std::uint64_t version = 0;
    Bytes blob;
};

// One (oid, new_version) per write, in submission order; NEW entries
// report their freshly allocated oids here.
struct CommitAck {
    std::vector<std::pair<ObjectId, std::uint64_t>> versions;
};

// Payload encoders/decoders (frame length prefix handled by transports).
Bytes encode_get_objects(const std::vector<ObjectId>& oids);
std::vector<ObjectId> decode_get_objects(BytesView payload);

Bytes encode_get_objects_resp(const std::vector<FetchedObject>& objects);
std::vector<FetchedObject> decode_get_objects_resp(BytesView payload);

Bytes encode_commit(const CommitBatch& batch);
CommitBatch decode_commit(BytesView payload);

Bytes encode_commit_resp_ok(const CommitAck& ack);
Bytes encode_commit_resp_conflict(ObjectId oid);
// Returns the ack, or throws ConflictError with the first mismatched oid.
CommitAck decode_commit_resp(BytesView payload);

Bytes encode_get_root(const std::string& name);
std::string decode_get_root(BytesView payload);

Bytes encode_get_root_resp(std::optional<ObjectId> root);
std::optional<ObjectId> decode_get_root_resp(BytesView payload);

Bytes frame(std::uint8_t type, BytesView payload);

class ObjectStore;

// Server side of the protocol: one request message in, one response out.
std::pair<std::uint8_t, Bytes> handle_request(ObjectStore& store,
                                              std::uint8_t type,
                                              BytesView payload);

}  // namespace zerotree::wire
