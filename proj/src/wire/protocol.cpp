#include "zerotree/wire/protocol.hpp"

#include "zerotree/errors.hpp"
#include "zerotree/wire/store.hpp"

namespace zerotree::wire {

Bytes encode_get_objects(const std::vector<ObjectId>& oids) {
    Bytes out;
    put_u32(out, static_cast<std::uint32_t>(oids.size()));
    for (auto oid : oids) put_u64(out, oid);
    return out;
}

std::vector<ObjectId> decode_get_objects(BytesView payload) {
    ByteReader r(payload);
    std::uint32_t n = r.read_u32();
    std::vector<ObjectId> oids;
    oids.reserve(n);
    for (std::uint32_t i = 0; i < n; ++i) oids.push_back(r.read_u64());
    return oids;
}

Bytes encode_get_objects_resp(const std::vector<FetchedObject>& objects) {
    Bytes out;
    put_u32(out, static_cast<std::uint32_t>(objects.size()));
    for (const auto& obj : objects) {
        put_u64(out, obj.oid);
        put_u8(out, obj.found ? 1 : 0);
        if (obj.found) {
            put_u64(out, obj.version);
            put_bytes(out, obj.blob);
        }
    }
    return out;
}

std::vector<FetchedObject> decode_get_objects_resp(BytesView payload) {
    ByteReader r(payload);
    std::uint32_t n = r.read_u32();
    std::vector<FetchedObject> out;
    out.reserve(n);
    for (std::uint32_t i = 0; i < n; ++i) {
        FetchedObject obj;
        obj.oid = r.read_u64();
        obj.found = r.read_u8() != 0;
        if (obj.found) {
            obj.version = r.read_u64();
            obj.blob = r.read_bytes();
        }
        out.push_back(std::move(obj));
    }
    return out;
}

Bytes encode_commit(const CommitBatch& batch) {
    Bytes out;
    put_u32(out, static_cast<std::uint32_t>(batch.writes.size()));
    for (const auto& w : batch.writes) {
        put_u8(out, w.is_new ? 0 : 1);
        if (!w.is_new) {
            put_u64(out, w.oid);
            put_u64(out, w.expected_version);
        }
        put_bytes(out, w.blob);
    }
    put_u32(out, static_cast<std::uint32_t>(batch.root_updates.size()));
    for (const auto& ru : batch.root_updates) {
        put_bytes(out, to_bytes(ru.index_name));
        put_u64(out, ru.root);
    }
    return out;
}

CommitBatch decode_commit(BytesView payload) {
    ByteReader r(payload);
    CommitBatch batch;
    std::uint32_t writes = r.read_u32();
    batch.writes.reserve(writes);
    for (std::uint32_t i = 0; i < writes; ++i) {
        WriteOp op;
        op.is_new = r.read_u8() == 0;
        if (!op.is_new) {
            op.oid = r.read_u64();
            op.expected_version = r.read_u64();
        }
        op.blob = r.read_bytes();
        batch.writes.push_back(std::move(op));
    }
    std::uint32_t roots = r.read_u32();
    batch.root_updates.reserve(roots);
    for (std::uint32_t i = 0; i < roots; ++i) {
        RootUpdate ru;
        ru.index_name = to_string(r.read_bytes());
        ru.root = r.read_u64();
        batch.root_updates.push_back(std::move(ru));
    }
    return batch;
}

Bytes encode_commit_resp_ok(const CommitAck& ack) {
    Bytes out;
    put_u8(out, 0);
    put_u32(out, static_cast<std::uint32_t>(ack.versions.size()));
    for (const auto& [oid, version] : ack.versions) {
        put_u64(out, oid);
        put_u64(out, version);
    }
    return out;
}

Bytes encode_commit_resp_conflict(ObjectId oid) {
    Bytes out;
    put_u8(out, 1);
    put_u64(out, oid);
    return out;
}

CommitAck decode_commit_resp(BytesView payload) {
    ByteReader r(payload);
    std::uint8_t status = r.read_u8();
    if (status == 1) throw ConflictError(r.read_u64());
    if (status != 0) throw CodecError("bad commit response status");
    CommitAck ack;
    std::uint32_t n = r.read_u32();
    ack.versions.reserve(n);
    for (std::uint32_t i = 0; i < n; ++i) {
        ObjectId oid = r.read_u64();
        std::uint64_t version = r.read_u64();
        ack.versions.emplace_back(oid, version);
    }
    return ack;
}

Bytes encode_get_root(const std::string& name) {
    Bytes out;
    put_bytes(out, to_bytes(name));
    return out;
}

std::string decode_get_root(BytesView payload) {
    ByteReader r(payload);
    return to_string(r.read_bytes());
}

Bytes encode_get_root_resp(std::optional<ObjectId> root) {
    Bytes out;
    put_u8(out, root.has_value() ? 1 : 0);
    if (root) put_u64(out, *root);
    return out;
}

std::optional<ObjectId> decode_get_root_resp(BytesView payload) {
    ByteReader r(payload);
    if (r.read_u8() == 0) return std::nullopt;
    return r.read_u64();
}

Bytes frame(std::uint8_t type, BytesView payload) {
    Bytes out;
    out.reserve(5 + payload.size());
    put_u32(out, static_cast<std::uint32_t>(payload.size() + 1));
    put_u8(out, type);
    append(out, payload);
    return out;
}

std::pair<std::uint8_t, Bytes> handle_request(ObjectStore& store,
                                              std::uint8_t type,
                                              BytesView payload) {
    try {
        switch (type) {
            case kGetObjects:
                return {kGetObjectsResp,
                        encode_get_objects_resp(store.get(decode_get_objects(payload)))};
            case kCommit: {
                auto outcome = store.commit(decode_commit(payload));
                if (auto* ack = std::get_if<CommitAck>(&outcome))
                    return {kCommitResp, encode_commit_resp_ok(*ack)};
                return {kCommitResp, encode_commit_resp_conflict(std::get<ObjectId>(outcome))};
            }
            case kGetRoot:
                return {kGetRootResp, encode_get_root_resp(store.get_root(decode_get_root(payload)))};
            default: {
                Bytes msg;
                put_bytes(msg, to_bytes("unknown message type"));
                return {kError, msg};
            }
        }
    } catch (const CodecError& e) {
        Bytes msg;
        put_bytes(msg, to_bytes(std::string("malformed request: ") + e.what()));
        return {kError, msg};
    }
}

}  // namespace zerotree::wire
