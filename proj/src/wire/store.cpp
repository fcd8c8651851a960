#include "zerotree/wire/store.hpp"

#include <fcntl.h>
#include <unistd.h>
#include <zlib.h>

#include <cerrno>
#include <cstring>

#include "zerotree/errors.hpp"

namespace zerotree::wire {

// Log record framing: u32 payload_len || u8 record_type || payload ||
// u32 crc32(record_type || payload). Commit records are the only type.
namespace {

constexpr std::uint8_t kCommitRecord = 0x01;
constexpr size_t kRecordOverhead = 4 + 1 + 4;

std::uint32_t record_crc(std::uint8_t type, BytesView payload) {
    uLong crc = crc32(0, nullptr, 0);
    crc = crc32(crc, &type, 1);
    crc = crc32(crc, payload.data(), static_cast<uInt>(payload.size()));
    return static_cast<std::uint32_t>(crc);
}

}  // namespace

ObjectStore::ObjectStore(const std::string& store_path) : path_(store_path) {
    fd_ = ::open(path_.c_str(), O_RDWR | O_CREAT, 0644);
    if (fd_ < 0) throw Error("cannot open store log " + path_ + ": " + std::strerror(errno));
    replay_log();
}

ObjectStore::~ObjectStore() {
    if (fd_ >= 0) ::close(fd_);
}

void ObjectStore::replay_log() {
    off_t size = ::lseek(fd_, 0, SEEK_END);
    if (size < 0) throw Error("lseek failed");
    Bytes log(static_cast<size_t>(size));
    if (size > 0) {
        ssize_t got = ::pread(fd_, log.data(), log.size(), 0);
        if (got != size) throw Error("short read of store log");
    }

    size_t pos = 0;
    size_t valid_end = 0;
    while (pos < log.size()) {
        if (log.size() - pos < kRecordOverhead) break;  // torn header
        std::uint32_t len = 0;
        for (int i = 0; i < 4; ++i) len = (len << 8) | log[pos + i];
        if (log.size() - pos - 5 < static_cast<size_t>(len) + 4) break;  // torn body
        std::uint8_t type = log[pos + 4];
        BytesView payload(log.data() + pos + 5, len);
        std::uint32_t stored_crc = 0;
        for (int i = 0; i < 4; ++i) stored_crc = (stored_crc << 8) | log[pos + 5 + len + i];
        if (stored_crc != record_crc(type, payload) || type != kCommitRecord) {
            // A bad final record is a torn write; a bad record with data
            // after it means the log body is corrupt.
            if (pos + kRecordOverhead + len < log.size())
                throw CorruptLog("corrupt record mid-log in " + path_);
            break;
        }

        ByteReader r(payload);
        std::uint32_t writes = r.read_u32();
        size_t cursor = pos + 5 + 4;
        for (std::uint32_t i = 0; i < writes; ++i) {
            ObjectId oid = r.read_u64();
            std::uint64_t version = r.read_u64();
            Bytes blob = r.read_bytes();
            cursor += 8 + 8 + 4;
            Slot slot;
            slot.version = version;
            slot.blob_offset = cursor;
            slot.blob_len = static_cast<std::uint32_t>(blob.size());
            objects_[oid] = slot;
            cursor += blob.size();
            if (oid >= next_oid_) next_oid_ = oid + 1;
        }
        std::uint32_t roots = r.read_u32();
        for (std::uint32_t i = 0; i < roots; ++i) {
            std::string name = to_string(r.read_bytes());
            roots_[name] = r.read_u64();
        }

        pos += kRecordOverhead + len;
        valid_end = pos;
    }

    log_size_ = valid_end;
    if (valid_end < log.size()) {
        // Drop the torn tail so the next append starts at a clean boundary.
        if (::ftruncate(fd_, static_cast<off_t>(valid_end)) != 0)
            throw Error("cannot truncate torn log tail");
    }
}

void ObjectStore::append_record(BytesView payload) {
    Bytes rec;
    rec.reserve(kRecordOverhead + payload.size());
    put_u32(rec, static_cast<std::uint32_t>(payload.size()));
    put_u8(rec, kCommitRecord);
    append(rec, payload);
    put_u32(rec, record_crc(kCommitRecord, payload));

    ssize_t wrote = ::pwrite(fd_, rec.data(), rec.size(), static_cast<off_t>(log_size_));
    if (wrote != static_cast<ssize_t>(rec.size())) throw Error("store log append failed");
    log_size_ += rec.size();
}

std::vector<FetchedObject> ObjectStore::get(const std::vector<ObjectId>& oids) const {
    std::vector<FetchedObject> out;
    out.reserve(oids.size());
    std::shared_lock lock(map_mutex_);
    for (auto oid : oids) {
        FetchedObject obj;
        obj.oid = oid;
        auto it = objects_.find(oid);
        if (it != objects_.end()) {
            obj.found = true;
            obj.version = it->second.version;
            obj.blob.resize(it->second.blob_len);
            ssize_t got = ::pread(fd_, obj.blob.data(), obj.blob.size(),
                                  static_cast<off_t>(it->second.blob_offset));
            if (got != static_cast<ssize_t>(obj.blob.size()))
                throw Error("store log read failed");
        }
        out.push_back(std::move(obj));
    }
    return out;
}

std::variant<CommitAck, ObjectId> ObjectStore::commit(const CommitBatch& batch) {
    std::lock_guard writer(writer_mutex_);

    // Version check first: reject the whole batch on the first mismatch.
    {
        std::shared_lock lock(map_mutex_);
        for (const auto& w : batch.writes) {
            if (w.is_new) continue;
            auto it = objects_.find(w.oid);
            std::uint64_t live = it == objects_.end() ? 0 : it->second.version;
            if (live != w.expected_version) return w.oid;
        }
    }

    CommitAck ack;
    ack.versions.reserve(batch.writes.size());
    Bytes payload;
    put_u32(payload, static_cast<std::uint32_t>(batch.writes.size()));
    std::vector<Slot> slots(batch.writes.size());
    size_t cursor = log_size_ + 5 + 4;  // first blob offset within the record
    for (size_t i = 0; i < batch.writes.size(); ++i) {
        const auto& w = batch.writes[i];
        ObjectId oid = w.is_new ? next_oid_++ : w.oid;
        std::uint64_t version = w.is_new ? 1 : w.expected_version + 1;
        put_u64(payload, oid);
        put_u64(payload, version);
        put_bytes(payload, w.blob);
        cursor += 8 + 8 + 4;
        slots[i].version = version;
        slots[i].blob_offset = cursor;
        slots[i].blob_len = static_cast<std::uint32_t>(w.blob.size());
        cursor += w.blob.size();
        ack.versions.emplace_back(oid, version);
    }
    put_u32(payload, static_cast<std::uint32_t>(batch.root_updates.size()));
    for (const auto& ru : batch.root_updates) {
        put_bytes(payload, to_bytes(ru.index_name));
        put_u64(payload, ru.root);
    }

    append_record(payload);

    {
        std::unique_lock lock(map_mutex_);
        for (size_t i = 0; i < batch.writes.size(); ++i)
            objects_[ack.versions[i].first] = slots[i];
        for (const auto& ru : batch.root_updates) roots_[ru.index_name] = ru.root;
    }
    return ack;
}

std::optional<ObjectId> ObjectStore::get_root(const std::string& index_name) const {
    std::shared_lock lock(map_mutex_);
    auto it = roots_.find(index_name);
    if (it == roots_.end()) return std::nullopt;
    return it->second;
}

std::uint64_t ObjectStore::object_count() const {
    std::shared_lock lock(map_mutex_);
    return objects_.size();
}

}  // namespace zerotree::wire
