#include "zerotree/crypto.hpp"

#include <openssl/evp.h>
#include <openssl/kdf.h>
#include <openssl/rand.h>
#include <openssl/sha.h>
#include <zlib.h>

#include <cstring>

namespace zerotree::crypto {

namespace {

struct CipherCtx {
    EVP_CIPHER_CTX* ctx;
    CipherCtx() : ctx(EVP_CIPHER_CTX_new()) {
        if (!ctx) throw Error("EVP_CIPHER_CTX_new failed");
    }
    ~CipherCtx() { EVP_CIPHER_CTX_free(ctx); }
    CipherCtx(const CipherCtx&) = delete;
    CipherCtx& operator=(const CipherCtx&) = delete;
};

EncryptedBlob gcm_encrypt(const SymmetricKey& key,
                          const std::array<std::uint8_t, kNonceSize>& nonce,
                          BytesView plaintext,
                          BytesView aad) {
    CipherCtx c;
    if (EVP_EncryptInit_ex(c.ctx, EVP_aes_256_gcm(), nullptr, key.bytes().data(), nonce.data()) != 1)
        throw Error("AES-GCM init failed");

    int len = 0;
    if (!aad.empty() &&
        EVP_EncryptUpdate(c.ctx, nullptr, &len, aad.data(), static_cast<int>(aad.size())) != 1)
        throw Error("AES-GCM aad failed");

    EncryptedBlob blob;
    blob.nonce = nonce;
    blob.ciphertext.resize(plaintext.size());
    if (!plaintext.empty() &&
        EVP_EncryptUpdate(c.ctx, blob.ciphertext.data(), &len, plaintext.data(),
                          static_cast<int>(plaintext.size())) != 1)
        throw Error("AES-GCM encrypt failed");

    std::uint8_t dummy[16];
    if (EVP_EncryptFinal_ex(c.ctx, dummy, &len) != 1) throw Error("AES-GCM final failed");
    if (EVP_CIPHER_CTX_ctrl(c.ctx, EVP_CTRL_GCM_GET_TAG, kTagSize, blob.tag.data()) != 1)
        throw Error("AES-GCM tag failed");
    return blob;
}

}  // namespace

SymmetricKey::SymmetricKey()
    : encryptions_(std::make_shared<std::atomic<std::uint64_t>>(0)) {}

SymmetricKey::SymmetricKey(const std::array<std::uint8_t, kKeySize>& bytes)
    : bytes_(bytes), encryptions_(std::make_shared<std::atomic<std::uint64_t>>(0)) {}

SymmetricKey SymmetricKey::random() {
    std::array<std::uint8_t, kKeySize> b{};
    if (RAND_bytes(b.data(), kKeySize) != 1) throw Error("RAND_bytes failed");
    return SymmetricKey(b);
}

void SymmetricKey::count_encryption() const {
    if (encryptions_->fetch_add(1, std::memory_order_relaxed) >= kMaxEncryptionsPerKey)
        throw NonceExhausted();
}

Bytes EncryptedBlob::encode() const {
    Bytes out;
    out.reserve(kNonceSize + ciphertext.size() + kTagSize);
    out.insert(out.end(), nonce.begin(), nonce.end());
    out.insert(out.end(), ciphertext.begin(), ciphertext.end());
    out.insert(out.end(), tag.begin(), tag.end());
    return out;
}

EncryptedBlob EncryptedBlob::decode(BytesView raw) {
    if (raw.size() < kNonceSize + kTagSize) throw CodecError("blob too short");
    EncryptedBlob blob;
    std::memcpy(blob.nonce.data(), raw.data(), kNonceSize);
    blob.ciphertext.assign(raw.begin() + kNonceSize, raw.end() - kTagSize);
    std::memcpy(blob.tag.data(), raw.data() + raw.size() - kTagSize, kTagSize);
    return blob;
}

KdfParams KdfParams::fresh() {
    KdfParams p;
    p.salt = random_bytes(16);
    return p;
}

EncryptedBlob encrypt_blob(const SymmetricKey& key, BytesView plaintext, BytesView associated_data) {
    key.count_encryption();
    std::array<std::uint8_t, kNonceSize> nonce{};
    if (RAND_bytes(nonce.data(), kNonceSize) != 1) throw Error("RAND_bytes failed");
    return gcm_encrypt(key, nonce, plaintext, associated_data);
}

EncryptedBlob encrypt_blob_with_nonce(const SymmetricKey& key,
                                      const std::array<std::uint8_t, kNonceSize>& nonce,
                                      BytesView plaintext,
                                      BytesView associated_data) {
    key.count_encryption();
    return gcm_encrypt(key, nonce, plaintext, associated_data);
}

Bytes decrypt_blob(const SymmetricKey& key, const EncryptedBlob& blob, BytesView associated_data) {
    CipherCtx c;
    if (EVP_DecryptInit_ex(c.ctx, EVP_aes_256_gcm(), nullptr, key.bytes().data(),
                           blob.nonce.data()) != 1)
        throw Error("AES-GCM init failed");

    int len = 0;
    if (!associated_data.empty() &&
        EVP_DecryptUpdate(c.ctx, nullptr, &len, associated_data.data(),
                          static_cast<int>(associated_data.size())) != 1)
        throw Error("AES-GCM aad failed");

    Bytes plain(blob.ciphertext.size());
    if (!blob.ciphertext.empty() &&
        EVP_DecryptUpdate(c.ctx, plain.data(), &len, blob.ciphertext.data(),
                          static_cast<int>(blob.ciphertext.size())) != 1)
        throw AuthenticationFailure();

    std::array<std::uint8_t, kTagSize> tag = blob.tag;
    if (EVP_CIPHER_CTX_ctrl(c.ctx, EVP_CTRL_GCM_SET_TAG, kTagSize, tag.data()) != 1)
        throw Error("AES-GCM tag failed");

    std::uint8_t dummy[16];
    if (EVP_DecryptFinal_ex(c.ctx, dummy, &len) != 1) throw AuthenticationFailure();
    return plain;
}

SymmetricKey derive_key_from_passphrase(std::string_view passphrase, const KdfParams& params) {
    if (passphrase.empty()) throw InvalidParams("empty passphrase");
    // scrypt requires N a power of two > 1; bound memory at 1 GiB.
    if (params.n < 2 || (params.n & (params.n - 1)) != 0 || params.r == 0 || params.p == 0 ||
        params.n * params.r * 128ull > (1ull << 30))
        throw InvalidParams("scrypt cost parameters out of range");

    std::array<std::uint8_t, kKeySize> out{};
    if (EVP_PBE_scrypt(passphrase.data(), passphrase.size(), params.salt.data(), params.salt.size(),
                       params.n, params.r, params.p, 1ull << 30, out.data(), out.size()) != 1)
        throw InvalidParams("scrypt derivation failed");
    return SymmetricKey(out);
}

SymmetricKey derive_child_key(const SymmetricKey& parent, BytesView child_label) {
    if (child_label.empty()) throw InvalidParams("empty child label");
    Bytes material(parent.bytes().begin(), parent.bytes().end());
    append(material, child_label);
    Bytes digest = sha256(material);
    std::array<std::uint8_t, kKeySize> out{};
    std::memcpy(out.data(), digest.data(), kKeySize);
    return SymmetricKey(out);
}

Bytes sha256(BytesView data) {
    Bytes digest(SHA256_DIGEST_LENGTH);
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), digest.data(), &len, EVP_sha256(), nullptr) != 1)
        throw Error("SHA-256 failed");
    digest.resize(len);
    return digest;
}

Bytes compress(BytesView data) {
    uLongf bound = compressBound(static_cast<uLong>(data.size()));
    Bytes out(bound);
    if (compress2(out.data(), &bound, data.data(), static_cast<uLong>(data.size()),
                  Z_DEFAULT_COMPRESSION) != Z_OK)
        throw Error("zlib compress failed");
    out.resize(bound);
    return out;
}

Bytes decompress(BytesView data) {
    // Grow the output until the stream fits; reject anything non-zlib.
    size_t guess = std::max<size_t>(data.size() * 4, 64);
    for (int attempts = 0; attempts < 16; ++attempts) {
        Bytes out(guess);
        uLongf out_len = static_cast<uLongf>(out.size());
        int rc = uncompress(out.data(), &out_len, data.data(), static_cast<uLong>(data.size()));
        if (rc == Z_OK) {
            out.resize(out_len);
            return out;
        }
        if (rc == Z_BUF_ERROR) {
            guess *= 4;
            continue;
        }
        throw CorruptStream("invalid zlib stream");
    }
    throw CorruptStream("decompressed output too large");
}

Bytes random_bytes(size_t n) {
    Bytes out(n);
    if (n > 0 && RAND_bytes(out.data(), static_cast<int>(n)) != 1) throw Error("RAND_bytes failed");
    return out;
}

}  // namespace zerotree::crypto
