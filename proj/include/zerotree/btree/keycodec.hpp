#pragma once

// Index key encodings. All index keys are byte strings compared
// lexicographically; these helpers embed other orders into that one.

#include <cstdint>
#include <optional>
#include <vector>

#include "zerotree/bytes.hpp"

namespace zerotree::btree {

// 8-byte big-endian with the sign bit flipped: lexicographic order of the
// encoding equals numeric order of the signed value.
Bytes encode_int_key(std::int64_t v);
std::int64_t decode_int_key(BytesView key);

// Composite keys: each component has 0x00 escaped as 0x00 0xFF and is
// terminated by 0x00 0x00. Concatenation compares component-wise, and a
// component boundary can never be confused with payload bytes.
Bytes encode_composite(const std::vector<Bytes>& components);
std::vector<Bytes> decode_composite(BytesView key);

// Half-open interval bounds over byte keys.
struct KeyRange {
    std::optional<Bytes> low;
    std::optional<Bytes> high;
    bool low_inclusive = true;
    bool high_inclusive = true;

    bool contains(BytesView key) const;
    // True when no key can satisfy the bounds.
    bool degenerate() const;

    static KeyRange all() { return {}; }
    static KeyRange at_least(Bytes k) { return {std::move(k), std::nullopt, true, true}; }
    static KeyRange at_most(Bytes k) { return {std::nullopt, std::move(k), true, true}; }
    static KeyRange closed(Bytes lo, Bytes hi) { return {std::move(lo), std::move(hi), true, true}; }
    static KeyRange single(Bytes k) {
        Bytes copy = k;
        return {std::move(k), std::move(copy), true, true};
    }
};

// Range matching every composite key whose leading components equal
// `prefix_components`.
KeyRange composite_prefix_range(const std::vector<Bytes>& prefix_components);

}  // namespace zerotree::btree
