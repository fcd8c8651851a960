#pragma once

// Client-side plaintext of one bucket: a branch (separator keys + child
// references) or a leaf (keys + inline values or value-object references).
// Serialization is bit-exact and versioned with a leading format tag.

#include <cstdint>
#include <vector>

#include "zerotree/bytes.hpp"
#include "zerotree/wire/protocol.hpp"

namespace zerotree::btree {

using wire::ObjectId;
using wire::kNullOid;

// A bucket reference: committed oid, or (during a staged transaction) a
// pending ordinal tagged in the top bit until the server allocates ids.
using NodeRef = std::uint64_t;
constexpr NodeRef kPendingTag = 1ull << 63;

inline bool is_pending(NodeRef ref) { return (ref & kPendingTag) != 0; }
inline NodeRef pending_ref(std::uint64_t ordinal) { return ordinal | kPendingTag; }
inline std::uint64_t pending_ordinal(NodeRef ref) { return ref & ~kPendingTag; }

// 8-byte big-endian object id: associated data for bucket encryption and
// the child label for key derivation.
Bytes oid_bytes(ObjectId oid);

enum class NodeKind : std::uint8_t { branch = 1, leaf = 2 };

struct LeafValue {
    enum class Kind : std::uint8_t { inline_bytes = 0, object_ref = 1 };
    Kind kind = Kind::inline_bytes;
    Bytes data;            // inline payload
    NodeRef ref = kNullOid;  // value object reference

    static LeafValue inline_value(Bytes data) {
        LeafValue v;
        v.data = std::move(data);
        return v;
    }
    static LeafValue reference(NodeRef ref) {
        LeafValue v;
        v.kind = Kind::object_ref;
        v.ref = ref;
        return v;
    }
};

struct BucketNode {
    NodeKind kind = NodeKind::leaf;
    std::vector<Bytes> keys;          // strictly increasing
    std::vector<NodeRef> children;    // branch: keys.size() + 1
    std::vector<LeafValue> values;    // leaf: keys.size()

    bool is_leaf() const { return kind == NodeKind::leaf; }

    // Index of the child subtree a key descends into.
    size_t descend_index(BytesView key) const;
    // Index of the first key >= probe (== keys.size() when none).
    size_t lower_bound(BytesView key) const;
    // Exact key position, or npos.
    static constexpr size_t npos = static_cast<size_t>(-1);
    size_t find(BytesView key) const;

    size_t serialized_size() const;
    Bytes serialize() const;  // rejects pending references
    static BucketNode deserialize(BytesView raw);

    void check_invariants() const;  // throws Error on violation
};

// Serialized branch record cost for fixed-width integer keys; the s_r
// analog used by the performance model.
constexpr size_t branch_record_size(size_t key_len) { return 2 + key_len + 8; }
constexpr size_t kIntKeyBranchRecordSize = branch_record_size(8);

}  // namespace zerotree::btree
