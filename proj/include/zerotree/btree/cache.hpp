#pragma once

// Client-side bucket cache, LRU-evicted by decrypted size. A hit returns
// the same node a fresh fetch+decrypt would.

#include <list>
#include <memory>
#include <optional>
#include <unordered_map>

#include "zerotree/btree/node.hpp"
#include "zerotree/crypto.hpp"

namespace zerotree::btree {

class ClientCache {
public:
    struct Entry {
        std::shared_ptr<const BucketNode> node;
        std::uint64_t version = 0;
        crypto::SymmetricKey key;  // chain key the bucket decrypts under
    };

    explicit ClientCache(size_t capacity_bytes) : capacity_(capacity_bytes) {}

    std::optional<Entry> get(ObjectId oid);
    void put(ObjectId oid, Entry entry);
    void erase(ObjectId oid);
    void clear();

    size_t size_bytes() const { return used_; }
    size_t capacity() const { return capacity_; }
    std::uint64_t hits = 0;
    std::uint64_t misses = 0;

private:
    size_t capacity_;
    size_t used_ = 0;
    std::list<std::pair<ObjectId, Entry>> lru_;  // front = most recent
    std::unordered_map<ObjectId, std::list<std::pair<ObjectId, Entry>>::iterator> index_;
};

}  // namespace zerotree::btree
