#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <zerotree/crypto.hpp>

#include <random>
#include <set>

using namespace zerotree;
using namespace zerotree::crypto;

namespace {

SymmetricKey key_from_hex(const std::string& hex) {
    Bytes raw = from_hex(hex);
    REQUIRE(raw.size() == kKeySize);
    std::array<std::uint8_t, kKeySize> arr{};
    std::copy(raw.begin(), raw.end(), arr.begin());
    return SymmetricKey(arr);
}

Bytes random_buffer(size_t n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    Bytes out(n);
    for (auto& b : out) b = static_cast<std::uint8_t>(rng());
    return out;
}

}  // namespace

TEST_CASE("aead round trip identity") {
    auto key = SymmetricKey::random();
    std::mt19937_64 rng(7);
    for (int i = 0; i < 50; ++i) {
        Bytes msg = random_buffer(rng() % 2048, rng());
        Bytes aad = random_buffer(rng() % 64, rng());
        auto blob = encrypt_blob(key, msg, aad);
        CHECK(decrypt_blob(key, blob, aad) == msg);
    }
}

TEST_CASE("nonces are fresh per encryption") {
    auto key = SymmetricKey::random();
    Bytes msg = to_bytes("same message");
    auto a = encrypt_blob(key, msg, {});
    auto b = encrypt_blob(key, msg, {});
    CHECK(a.nonce != b.nonce);
    CHECK(a.ciphertext != b.ciphertext);
}

TEST_CASE("aes-256-gcm known-answer vector via nonce seam") {
    // McGrew & Viega GCM spec, test case 16.
    auto key = key_from_hex("feffe9928665731c6d6a8f9467308308feffe9928665731c6d6a8f9467308308");
    Bytes iv = from_hex("cafebabefacedbaddecaf888");
    std::array<std::uint8_t, kNonceSize> nonce{};
    std::copy(iv.begin(), iv.end(), nonce.begin());
    Bytes pt = from_hex(
        "d9313225f88406e5a55909c5aff5269a86a7a9531534f7da2e4c303d8a318a72"
        "1c3c0c95956809532fcf0e2449a6b525b16aedf5aa0de657ba637b39");
    Bytes aad = from_hex("feedfacedeadbeeffeedfacedeadbeefabaddad2");

    auto blob = encrypt_blob_with_nonce(key, nonce, pt, aad);
    CHECK(to_hex(blob.ciphertext) ==
          "522dc1f099567d07f47f37a32a84427d643a8cdcbfe5c0c97598a2bd2555d1aa"
          "8cb08e48590dbb3da7b08b1056828838c5f61e6393ba7a0abcc9f662");
    CHECK(to_hex(BytesView(blob.tag)) == "76fc6ece0f4e1768cddf8853bb2d551b");
}

TEST_CASE("any single-bit perturbation fails authentication") {
    auto key = SymmetricKey::random();
    Bytes msg = to_bytes("bucket contents worth protecting");
    Bytes aad = to_bytes("oid-7");
    auto blob = encrypt_blob(key, msg, aad);

    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 40; ++trial) {
        auto copy = blob;
        size_t field = rng() % 3;
        if (field == 0) {
            copy.nonce[rng() % copy.nonce.size()] ^= static_cast<std::uint8_t>(1u << (rng() % 8));
        } else if (field == 1) {
            copy.ciphertext[rng() % copy.ciphertext.size()] ^=
                static_cast<std::uint8_t>(1u << (rng() % 8));
        } else {
            copy.tag[rng() % copy.tag.size()] ^= static_cast<std::uint8_t>(1u << (rng() % 8));
        }
        CHECK_THROWS_AS(decrypt_blob(key, copy, aad), AuthenticationFailure);
    }
}

TEST_CASE("wrong key and wrong associated data fail authentication") {
    auto key = SymmetricKey::random();
    auto blob = encrypt_blob(key, to_bytes("payload"), to_bytes("id:1"));
    CHECK_THROWS_AS(decrypt_blob(SymmetricKey::random(), blob, to_bytes("id:1")),
                    AuthenticationFailure);
    CHECK_THROWS_AS(decrypt_blob(key, blob, to_bytes("id:2")), AuthenticationFailure);
    CHECK(decrypt_blob(key, blob, to_bytes("id:1")) == to_bytes("payload"));
}

TEST_CASE("blob wire encoding round trips") {
    auto key = SymmetricKey::random();
    auto blob = encrypt_blob(key, to_bytes("some data"), to_bytes("aad"));
    auto decoded = EncryptedBlob::decode(blob.encode());
    CHECK(decoded.nonce == blob.nonce);
    CHECK(decoded.ciphertext == blob.ciphertext);
    CHECK(decoded.tag == blob.tag);
    CHECK(decrypt_blob(key, decoded, to_bytes("aad")) == to_bytes("some data"));
}

TEST_CASE("scrypt matches published vectors") {
    // RFC 7914 section 12, truncated to our 32-byte key size.
    KdfParams p1{to_bytes("NaCl"), 1024, 8, 16};
    CHECK(to_hex(BytesView(derive_key_from_passphrase("password", p1).bytes())) ==
          "fdbabe1c9d3472007856e7190d01e9fe7c6ad7cbc8237830e77376634b373162");

    KdfParams p2{to_bytes("SodiumChloride"), 16384, 8, 1};
    CHECK(to_hex(BytesView(derive_key_from_passphrase("pleaseletmein", p2).bytes())) ==
          "7023bdcb3afd7348461c06cd81fd38ebfda8fbba904f8e3ea9b543f6545da1f2");
}

TEST_CASE("scrypt determinism and salt sensitivity") {
    auto params = KdfParams::fresh();
    auto k1 = derive_key_from_passphrase("hunter2", params);
    auto k2 = derive_key_from_passphrase("hunter2", params);
    CHECK(k1 == k2);

    auto other = params;
    other.salt = crypto::random_bytes(16);
    CHECK_FALSE(derive_key_from_passphrase("hunter2", other) == k1);

    KdfParams bad = params;
    bad.n = 3;  // not a power of two
    CHECK_THROWS_AS(derive_key_from_passphrase("hunter2", bad), InvalidParams);
    CHECK_THROWS_AS(derive_key_from_passphrase("", params), InvalidParams);
}

TEST_CASE("child key derivation matches independent sha-256") {
    SymmetricKey zero(std::array<std::uint8_t, kKeySize>{});
    auto child = derive_child_key(zero, to_bytes("0"));
    // SHA256(32 zero bytes || "0"), computed with an unrelated implementation.
    CHECK(to_hex(BytesView(child.bytes())) ==
          "4f59298d607f3143532ed694fb2f10454a684c1a29ef83e250bf5e234c6720b7");

    auto again = derive_child_key(zero, to_bytes("0"));
    CHECK(child == again);
    CHECK_FALSE(derive_child_key(zero, to_bytes("1")) == derive_child_key(zero, to_bytes("2")));
}

TEST_CASE("child keys collision-free over many random labels") {
    auto parent = SymmetricKey::random();
    std::mt19937_64 rng(99);
    std::set<std::array<std::uint8_t, kKeySize>> seen;
    // 10^6 labels is the spec-level property; 10^5 keeps the unit suite
    // quick and already rules out anything but SHA-256 breakage.
    for (int i = 0; i < 100000; ++i) {
        Bytes label(8);
        for (auto& b : label) b = static_cast<std::uint8_t>(rng());
        auto [it, fresh] = seen.insert(derive_child_key(parent, label).bytes());
        CHECK(fresh);
    }
}

TEST_CASE("zlib round trip and compressibility") {
    Bytes random = random_buffer(10 * 1024, 4242);
    CHECK(decompress(compress(random)) == random);

    Bytes repetitive;
    for (int i = 0; i < 10 * 1024 / 16; ++i) append(repetitive, to_bytes("zerotree bucket "));
    auto packed = compress(repetitive);
    CHECK(decompress(packed) == repetitive);
    CHECK(packed.size() * 3 < repetitive.size());

    CHECK_THROWS_AS(decompress(random_buffer(256, 5)), CorruptStream);
}

TEST_CASE("encryption does not compress") {
    // Ciphertext length tracks plaintext length exactly; any size win on
    // compressible data must come from the compression pass.
    auto key = SymmetricKey::random();
    Bytes compressible(4096, std::uint8_t{'a'});
    Bytes incompressible = random_buffer(4096, 21);
    auto c1 = encrypt_blob(key, compressible, {});
    auto c2 = encrypt_blob(key, incompressible, {});
    CHECK(c1.ciphertext.size() == c2.ciphertext.size());
    CHECK(compress(compressible).size() < compress(incompressible).size());
}
