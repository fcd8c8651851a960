#include "zerotree/btree/keycodec.hpp"

#include "zerotree/errors.hpp"

namespace zerotree::btree {

Bytes encode_int_key(std::int64_t v) {
    std::uint64_t u = static_cast<std::uint64_t>(v) ^ (1ull << 63);
    Bytes out;
    put_u64(out, u);
    return out;
}

std::int64_t decode_int_key(BytesView key) {
    if (key.size() != 8) throw CodecError("integer key must be 8 bytes");
    std::uint64_t u = 0;
    for (int i = 0; i < 8; ++i) u = (u << 8) | key[i];
    return static_cast<std::int64_t>(u ^ (1ull << 63));
}

Bytes encode_composite(const std::vector<Bytes>& components) {
    Bytes out;
    for (const auto& comp : components) {
        for (auto b : comp) {
            out.push_back(b);
            if (b == 0x00) out.push_back(0xFF);
        }
        out.push_back(0x00);
        out.push_back(0x00);
    }
    return out;
}

std::vector<Bytes> decode_composite(BytesView key) {
    std::vector<Bytes> out;
    Bytes current;
    size_t i = 0;
    while (i < key.size()) {
        std::uint8_t b = key[i];
        if (b != 0x00) {
            current.push_back(b);
            ++i;
            continue;
        }
        if (i + 1 >= key.size()) throw CodecError("dangling escape in composite key");
        std::uint8_t next = key[i + 1];
        if (next == 0xFF) {
            current.push_back(0x00);
            i += 2;
        } else if (next == 0x00) {
            out.push_back(std::move(current));
            current.clear();
            i += 2;
        } else {
            throw CodecError("bad escape in composite key");
        }
    }
    if (!current.empty()) throw CodecError("unterminated composite component");
    return out;
}

bool KeyRange::contains(BytesView key) const {
    if (low) {
        int c = compare_bytes(key, *low);
        if (c < 0 || (c == 0 && !low_inclusive)) return false;
    }
    if (high) {
        int c = compare_bytes(key, *high);
        if (c > 0 || (c == 0 && !high_inclusive)) return false;
    }
    return true;
}

bool KeyRange::degenerate() const {
    if (!low || !high) return false;
    int c = compare_bytes(*low, *high);
    if (c > 0) return true;
    if (c == 0) return !(low_inclusive && high_inclusive);
    return false;
}

KeyRange composite_prefix_range(const std::vector<Bytes>& prefix_components) {
    Bytes low = encode_composite(prefix_components);
    // Everything extending the prefix sorts below the prefix with its
    // final terminator byte bumped from 0x00 to 0x01.
    Bytes high = low;
    high.back() = 0x01;
    KeyRange r;
    r.low = std::move(low);
    r.high = std::move(high);
    r.low_inclusive = true;
    r.high_inclusive = false;
    return r;
}

}  // namespace zerotree::btree
