#include "zerotree/btree/node.hpp"

#include <algorithm>

#include "zerotree/errors.hpp"

namespace zerotree::btree {

namespace {
constexpr std::uint8_t kFormatTag = 1;

bool key_less(const Bytes& a, BytesView b) {
    return compare_bytes(a, b) < 0;
}
}  // namespace

Bytes oid_bytes(ObjectId oid) {
    Bytes out;
    put_u64(out, oid);
    return out;
}

size_t BucketNode::descend_index(BytesView key) const {
    // Number of separators <= key; equal keys live in the right subtree.
    size_t lo = 0, hi = keys.size();
    while (lo < hi) {
        size_t mid = (lo + hi) / 2;
        if (compare_bytes(keys[mid], key) <= 0)
            lo = mid + 1;
        else
            hi = mid;
    }
    return lo;
}

size_t BucketNode::lower_bound(BytesView key) const {
    auto it = std::lower_bound(keys.begin(), keys.end(), key, key_less);
    return static_cast<size_t>(it - keys.begin());
}

size_t BucketNode::find(BytesView key) const {
    size_t i = lower_bound(key);
    if (i < keys.size() && compare_bytes(keys[i], key) == 0) return i;
    return npos;
}

size_t BucketNode::serialized_size() const {
    size_t size = 1 + 1 + 2;
    for (const auto& k : keys) size += 2 + k.size();
    if (kind == NodeKind::branch) {
        size += children.size() * 8;
    } else {
        for (const auto& v : values) {
            size += 1;
            size += v.kind == LeafValue::Kind::inline_bytes ? 2 + v.data.size() : 8;
        }
    }
    return size;
}

Bytes BucketNode::serialize() const {
    Bytes out;
    out.reserve(serialized_size());
    put_u8(out, kFormatTag);
    put_u8(out, static_cast<std::uint8_t>(kind));
    put_u16(out, static_cast<std::uint16_t>(keys.size()));
    for (const auto& k : keys) {
        if (k.size() > 0xFFFF) throw Error("key too long to serialize");
        put_u16(out, static_cast<std::uint16_t>(k.size()));
        append(out, k);
    }
    if (kind == NodeKind::branch) {
        for (auto c : children) {
            if (is_pending(c)) throw Error("pending child reference at serialization");
            put_u64(out, c);
        }
    } else {
        for (const auto& v : values) {
            put_u8(out, static_cast<std::uint8_t>(v.kind));
            if (v.kind == LeafValue::Kind::inline_bytes) {
                if (v.data.size() > 0xFFFF) throw Error("inline value too long");
                put_u16(out, static_cast<std::uint16_t>(v.data.size()));
                append(out, v.data);
            } else {
                if (is_pending(v.ref)) throw Error("pending value reference at serialization");
                put_u64(out, v.ref);
            }
        }
    }
    return out;
}

BucketNode BucketNode::deserialize(BytesView raw) {
    ByteReader r(raw);
    if (r.read_u8() != kFormatTag) throw CodecError("unknown bucket format tag");
    BucketNode node;
    node.kind = static_cast<NodeKind>(r.read_u8());
    if (node.kind != NodeKind::branch && node.kind != NodeKind::leaf)
        throw CodecError("bad bucket kind");
    std::uint16_t count = r.read_u16();
    node.keys.reserve(count);
    for (std::uint16_t i = 0; i < count; ++i) {
        std::uint16_t len = r.read_u16();
        node.keys.push_back(r.read_raw(len));
    }
    if (node.kind == NodeKind::branch) {
        node.children.reserve(count + 1);
        for (std::uint32_t i = 0; i < static_cast<std::uint32_t>(count) + 1; ++i)
            node.children.push_back(r.read_u64());
    } else {
        node.values.reserve(count);
        for (std::uint16_t i = 0; i < count; ++i) {
            auto kind = static_cast<LeafValue::Kind>(r.read_u8());
            if (kind == LeafValue::Kind::inline_bytes) {
                std::uint16_t len = r.read_u16();
                node.values.push_back(LeafValue::inline_value(r.read_raw(len)));
            } else if (kind == LeafValue::Kind::object_ref) {
                node.values.push_back(LeafValue::reference(r.read_u64()));
            } else {
                throw CodecError("bad leaf value kind");
            }
        }
    }
    if (!r.done()) throw CodecError("trailing bytes after bucket");
    node.check_invariants();
    return node;
}

void BucketNode::check_invariants() const {
    for (size_t i = 1; i < keys.size(); ++i)
        if (compare_bytes(keys[i - 1], keys[i]) >= 0)
            throw Error("bucket keys not strictly increasing");
    if (kind == NodeKind::branch) {
        if (children.size() != keys.size() + 1)
            throw Error("branch child count != key count + 1");
        if (!values.empty()) throw Error("branch carries leaf values");
    } else {
        if (values.size() != keys.size()) throw Error("leaf value count != key count");
        if (!children.empty()) throw Error("leaf carries children");
    }
}

}  // namespace zerotree::btree
