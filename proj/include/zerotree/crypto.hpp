#pragma once

// Symmetric primitives shared by every client-side module: AES-256-GCM
// bucket encryption, scrypt passphrase key derivation, SHA-256 child-key
// derivation for the bucket key hierarchy, and zlib compression (applied
// before encryption).

#include <array>
#include <atomic>
#include <cstdint>
#include <memory>
#include <string_view>

#include "zerotree/bytes.hpp"
#include "zerotree/errors.hpp"

namespace zerotree::crypto {

constexpr size_t kKeySize = 32;
constexpr size_t kNonceSize = 12;
constexpr size_t kTagSize = 16;

// A key may encrypt at most 2^32 blobs before random 96-bit nonces stop
// being safe; the shared counter enforces the budget across copies.
constexpr std::uint64_t kMaxEncryptionsPerKey = 1ull << 32;

class SymmetricKey {
public:
    SymmetricKey();
    explicit SymmetricKey(const std::array<std::uint8_t, kKeySize>& bytes);
    static SymmetricKey random();

    const std::array<std::uint8_t, kKeySize>& bytes() const { return bytes_; }
    bool operator==(const SymmetricKey& other) const { return bytes_ == other.bytes_; }

    // Called by encrypt_blob; throws NonceExhausted past the budget.
    void count_encryption() const;

private:
    std::array<std::uint8_t, kKeySize> bytes_{};
    std::shared_ptr<std::atomic<std::uint64_t>> encryptions_;
};

struct EncryptedBlob {
    std::array<std::uint8_t, kNonceSize> nonce{};
    Bytes ciphertext;
    std::array<std::uint8_t, kTagSize> tag{};

    // Wire encoding: nonce || ciphertext || tag.
    Bytes encode() const;
    static EncryptedBlob decode(BytesView raw);
};

struct KdfParams {
    Bytes salt;             // 16 bytes when generated by us
    std::uint64_t n = 1ull << 15;
    std::uint32_t r = 8;
    std::uint32_t p = 1;

    static KdfParams fresh();
};

EncryptedBlob encrypt_blob(const SymmetricKey& key, BytesView plaintext, BytesView associated_data);

// Test seam: deterministic nonce, bypasses the freshness path. Never used
// outside known-answer tests.
EncryptedBlob encrypt_blob_with_nonce(const SymmetricKey& key,
                                      const std::array<std::uint8_t, kNonceSize>& nonce,
                                      BytesView plaintext,
                                      BytesView associated_data);

Bytes decrypt_blob(const SymmetricKey& key, const EncryptedBlob& blob, BytesView associated_data);

SymmetricKey derive_key_from_passphrase(std::string_view passphrase, const KdfParams& params);

// k_child = SHA256(parent key bytes || child_label).
SymmetricKey derive_child_key(const SymmetricKey& parent, BytesView child_label);

Bytes sha256(BytesView data);

Bytes compress(BytesView data);
Bytes decompress(BytesView data);

Bytes random_bytes(size_t n);

}  // namespace zerotree::crypto
