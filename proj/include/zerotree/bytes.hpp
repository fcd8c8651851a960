#pragma once

#include <cstdint>
#include <cstring>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace zerotree {

using Bytes = std::vector<std::uint8_t>;
using BytesView = std::span<const std::uint8_t>;

inline Bytes to_bytes(std::string_view s) {
    return Bytes(s.begin(), s.end());
}

inline std::string to_string(BytesView b) {
    return std::string(reinterpret_cast<const char*>(b.data()), b.size());
}

inline void append(Bytes& out, BytesView b) {
    out.insert(out.end(), b.begin(), b.end());
}

inline int compare_bytes(BytesView a, BytesView b) {
    const size_t n = std::min(a.size(), b.size());
    if (n > 0) {
        int c = std::memcmp(a.data(), b.data(), n);
        if (c != 0) return c < 0 ? -1 : 1;
    }
    if (a.size() == b.size()) return 0;
    return a.size() < b.size() ? -1 : 1;
}

std::string to_hex(BytesView b);
Bytes from_hex(std::string_view hex);

// Big-endian integer helpers shared by the wire protocol, node
// serialization, and key encodings.

inline void put_u8(Bytes& out, std::uint8_t v) {
    out.push_back(v);
}

inline void put_u16(Bytes& out, std::uint16_t v) {
    out.push_back(static_cast<std::uint8_t>(v >> 8));
    out.push_back(static_cast<std::uint8_t>(v));
}

inline void put_u32(Bytes& out, std::uint32_t v) {
    for (int i = 3; i >= 0; --i) out.push_back(static_cast<std::uint8_t>(v >> (i * 8)));
}

inline void put_u64(Bytes& out, std::uint64_t v) {
    for (int i = 7; i >= 0; --i) out.push_back(static_cast<std::uint8_t>(v >> (i * 8)));
}

inline void put_bytes(Bytes& out, BytesView b) {
    put_u32(out, static_cast<std::uint32_t>(b.size()));
    append(out, b);
}

// Cursor over a byte buffer; all read_* throw CodecError on underrun.
class ByteReader {
public:
    explicit ByteReader(BytesView data) : data_(data) {}

    std::uint8_t read_u8();
    std::uint16_t read_u16();
    std::uint32_t read_u32();
    std::uint64_t read_u64();
    Bytes read_raw(size_t n);
    Bytes read_bytes();  // u32 length prefix + payload
    bool done() const { return pos_ == data_.size(); }
    size_t remaining() const { return data_.size() - pos_; }

private:
    void need(size_t n);
    BytesView data_;
    size_t pos_ = 0;
};

}  // namespace zerotree
