#include "zerotree/btree/cache.hpp"

namespace zerotree::btree {

std::optional<ClientCache::Entry> ClientCache::get(ObjectId oid) {
    auto it = index_.find(oid);
    if (it == index_.end()) {
        ++misses;
        return std::nullopt;
    }
    ++hits;
    lru_.splice(lru_.begin(), lru_, it->second);
    return it->second->second;
}

void ClientCache::put(ObjectId oid, Entry entry) {
    erase(oid);
    size_t cost = entry.node->serialized_size();
    if (cost > capacity_) return;  // never retain more than s_c
    lru_.emplace_front(oid, std::move(entry));
    index_[oid] = lru_.begin();
    used_ += cost;
    while (used_ > capacity_ && !lru_.empty()) {
        auto& victim = lru_.back();
        used_ -= victim.second.node->serialized_size();
        index_.erase(victim.first);
        lru_.pop_back();
    }
}

void ClientCache::erase(ObjectId oid) {
    auto it = index_.find(oid);
    if (it == index_.end()) return;
    used_ -= it->second->second.node->serialized_size();
    lru_.erase(it->second);
    index_.erase(it);
}

void ClientCache::clear() {
    lru_.clear();
    index_.clear();
    used_ = 0;
}

}  // namespace zerotree::btree
