#pragma once

// Server-side object store: an append-only log of framed commit records
// plus an in-memory oid -> (offset, version) map rebuilt on startup. The
// store never interprets blob contents.

#include <cstdint>
#include <map>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <unordered_map>
#include <variant>
#include <vector>

#include "zerotree/wire/protocol.hpp"

namespace zerotree::wire {

class ObjectStore {
public:
    // Replays the log at store_path; throws CorruptLog when the tail is
    // unrecoverable (a bad record followed by further data). A torn final
    // record is discarded.
    explicit ObjectStore(const std::string& store_path);
    ~ObjectStore();
    ObjectStore(const ObjectStore&) = delete;
    ObjectStore& operator=(const ObjectStore&) = delete;

    std::vector<FetchedObject> get(const std::vector<ObjectId>& oids) const;

    // Atomic: applies every write and root update iff all expected
    // versions match; otherwise returns the first conflicting oid.
    std::variant<CommitAck, ObjectId> commit(const CommitBatch& batch);

    std::optional<ObjectId> get_root(const std::string& index_name) const;

    std::uint64_t object_count() const;

private:
    struct Slot {
        std::uint64_t version = 0;
        std::uint64_t blob_offset = 0;  // into the log file
        std::uint32_t blob_len = 0;
    };

    void replay_log();
    void append_record(BytesView payload);

    std::string path_;
    int fd_ = -1;
    std::uint64_t log_size_ = 0;
    ObjectId next_oid_ = 1;

    mutable std::shared_mutex map_mutex_;
    std::unordered_map<ObjectId, Slot> objects_;
    std::map<std::string, ObjectId> roots_;

    std::mutex writer_mutex_;  // serializes commits
};

}  // namespace zerotree::wire
