#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <zerotree/crypto.hpp>
#include <zerotree/wire/client.hpp>
#include <zerotree/wire/server.hpp>
#include <zerotree/wire/store.hpp>

#include <fstream>
#include <random>
#include <thread>

#include "support/tmpdir.hpp"

using namespace zerotree;
using namespace zerotree::wire;
using zerotree::testsupport::TmpDir;

namespace {

Bytes file_contents(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    return Bytes(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

bool contains(BytesView haystack, BytesView needle) {
    if (needle.empty() || haystack.size() < needle.size()) return false;
    auto it = std::search(haystack.begin(), haystack.end(), needle.begin(), needle.end());
    return it != haystack.end();
}

}  // namespace

TEST_CASE("commit assigns oids and versions; get returns them") {
    TmpDir dir;
    ObjectStore store(dir.file("store.log"));
    LocalClient client(store);

    CommitBatch batch;
    batch.writes.push_back(WriteOp::create(to_bytes("blob-a")));
    batch.writes.push_back(WriteOp::create(to_bytes("blob-b")));
    auto ack = client.commit(batch);
    REQUIRE(ack.versions.size() == 2);
    CHECK(ack.versions[0].second == 1);
    CHECK(ack.versions[1].second == 1);
    CHECK(ack.versions[0].first != ack.versions[1].first);
    CHECK(ack.versions[0].first != kNullOid);

    auto objs = client.get_objects({ack.versions[0].first});
    REQUIRE(objs.size() == 1);
    CHECK(objs[0].found);
    CHECK(objs[0].version == 1);
    CHECK(objs[0].blob == to_bytes("blob-a"));
}

TEST_CASE("batched get is one exchange and reports per-oid misses") {
    TmpDir dir;
    ObjectStore store(dir.file("store.log"));
    LocalClient client(store);

    CommitBatch batch;
    for (int i = 0; i < 3; ++i) batch.writes.push_back(WriteOp::create({std::uint8_t(i)}));
    auto ack = client.commit(batch);

    auto before = client.stats().exchanges;
    auto objs = client.get_objects(
        {ack.versions[0].first, ack.versions[1].first, ack.versions[2].first, 999999});
    CHECK(client.stats().exchanges == before + 1);
    REQUIRE(objs.size() == 4);
    CHECK(objs[0].found);
    CHECK(objs[1].found);
    CHECK(objs[2].found);
    CHECK_FALSE(objs[3].found);
    CHECK(objs[3].oid == 999999);
}

TEST_CASE("optimistic overwrite and conflict") {
    TmpDir dir;
    ObjectStore store(dir.file("store.log"));
    LocalClient client(store);

    CommitBatch create;
    create.writes.push_back(WriteOp::create(to_bytes("v1")));
    auto oid = client.commit(create).versions[0].first;

    CommitBatch good;
    good.writes.push_back(WriteOp::overwrite(oid, 1, to_bytes("v2")));
    CHECK(client.commit(good).versions[0].second == 2);

    CommitBatch stale;
    stale.writes.push_back(WriteOp::overwrite(oid, 1, to_bytes("v2-again")));
    CHECK_THROWS_AS(client.commit(stale), ConflictError);

    auto objs = client.get_objects({oid});
    CHECK(objs[0].version == 2);
    CHECK(objs[0].blob == to_bytes("v2"));
}

TEST_CASE("batch with one mismatch applies nothing") {
    TmpDir dir;
    ObjectStore store(dir.file("store.log"));
    LocalClient client(store);

    CommitBatch create;
    for (int i = 0; i < 5; ++i)
        create.writes.push_back(WriteOp::create(to_bytes("x" + std::to_string(i))));
    auto ack = client.commit(create);

    CommitBatch mixed;
    for (int i = 0; i < 5; ++i) {
        std::uint64_t expected = (i == 3) ? 7 : 1;  // one stale slot
        mixed.writes.push_back(
            WriteOp::overwrite(ack.versions[i].first, expected, to_bytes("y" + std::to_string(i))));
    }
    try {
        client.commit(mixed);
        FAIL("expected conflict");
    } catch (const ConflictError& e) {
        CHECK(e.oid == ack.versions[3].first);
    }

    for (int i = 0; i < 5; ++i) {
        auto objs = client.get_objects({ack.versions[i].first});
        CHECK(objs[0].version == 1);
        CHECK(objs[0].blob == to_bytes("x" + std::to_string(i)));
    }
}

TEST_CASE("root updates are atomic with their batch") {
    TmpDir dir;
    ObjectStore store(dir.file("store.log"));
    LocalClient client(store);

    CHECK_FALSE(client.get_root("people").has_value());

    CommitBatch batch;
    batch.writes.push_back(WriteOp::create(to_bytes("root bucket")));
    batch.root_updates.push_back({"people", 0});  // patched below

    // The client cannot know the fresh oid up front, so a named root can
    // only reference an already-allocated object; allocate first, then
    // bind the name in a second atomic batch.
    auto oid = client.commit(batch).versions[0].first;
    CommitBatch bind;
    bind.root_updates.push_back({"people", oid});
    client.commit(bind);

    REQUIRE(client.get_root("people").has_value());
    CHECK(*client.get_root("people") == oid);
    CHECK_FALSE(client.get_root("nobody").has_value());
}

TEST_CASE("durability across restart") {
    TmpDir dir;
    std::vector<std::pair<ObjectId, Bytes>> written;
    {
        ObjectStore store(dir.file("store.log"));
        LocalClient client(store);
        for (int i = 0; i < 3; ++i) {
            CommitBatch batch;
            Bytes blob = crypto::random_bytes(100 + i);
            batch.writes.push_back(WriteOp::create(blob));
            if (i == 0) batch.root_updates.push_back({"ix", 1});
            auto ack = client.commit(batch);
            written.emplace_back(ack.versions[0].first, blob);
        }
    }
    ObjectStore reopened(dir.file("store.log"));
    LocalClient client(reopened);
    for (auto& [oid, blob] : written) {
        auto objs = client.get_objects({oid});
        REQUIRE(objs[0].found);
        CHECK(objs[0].version == 1);
        CHECK(objs[0].blob == blob);
    }
    CHECK(client.get_root("ix").has_value());

    // Fresh allocations must not reuse recovered oids.
    CommitBatch more;
    more.writes.push_back(WriteOp::create(to_bytes("new")));
    auto fresh = client.commit(more).versions[0].first;
    for (auto& [oid, blob] : written) CHECK(fresh != oid);
}

TEST_CASE("torn tail is discarded, corrupt body refuses to start") {
    TmpDir dir;
    std::string path = dir.file("store.log");
    ObjectId first_oid;
    {
        ObjectStore store(path);
        LocalClient client(store);
        CommitBatch a;
        a.writes.push_back(WriteOp::create(to_bytes("keep me")));
        first_oid = client.commit(a).versions[0].first;
        CommitBatch b;
        b.writes.push_back(WriteOp::create(to_bytes("torn away")));
        client.commit(b);
    }

    SUBCASE("truncated final record recovers to the last valid one") {
        auto log = file_contents(path);
        std::ofstream out(path, std::ios::binary | std::ios::trunc);
        out.write(reinterpret_cast<const char*>(log.data()),
                  static_cast<std::streamsize>(log.size() - 7));
        out.close();

        ObjectStore store(path);
        auto objs = store.get({first_oid});
        CHECK(objs[0].found);
        CHECK(store.object_count() == 1);
    }

    SUBCASE("flipped byte mid-log throws CorruptLog") {
        auto log = file_contents(path);
        log[10] ^= 0xFF;  // inside the first record
        std::ofstream out(path, std::ios::binary | std::ios::trunc);
        out.write(reinterpret_cast<const char*>(log.data()),
                  static_cast<std::streamsize>(log.size()));
        out.close();
        CHECK_THROWS_AS(ObjectStore{path}, CorruptLog);
    }
}

TEST_CASE("tcp server round trip and bind failure") {
    TmpDir dir;
    Server server("127.0.0.1", 0, dir.file("store.log"));
    server.start();

    TcpClient client("127.0.0.1", server.port());
    CommitBatch batch;
    batch.writes.push_back(WriteOp::create(to_bytes("over tcp")));
    auto ack = client.commit(batch);
    auto objs = client.get_objects({ack.versions[0].first});
    REQUIRE(objs[0].found);
    CHECK(objs[0].blob == to_bytes("over tcp"));
    CHECK(client.stats().exchanges == 2);

    CHECK_THROWS_AS(Server("127.0.0.1", server.port(), dir.file("other.log")), BindFailure);
    server.stop();
}

TEST_CASE("concurrent committers: disjoint succeed, linearizable versions") {
    TmpDir dir;
    Server server("127.0.0.1", 0, dir.file("store.log"));
    server.start();

    // Disjoint oids: all succeed.
    ObjectId shared_oid;
    {
        TcpClient setup("127.0.0.1", server.port());
        CommitBatch batch;
        batch.writes.push_back(WriteOp::create(to_bytes("shared")));
        shared_oid = setup.commit(batch).versions[0].first;
    }

    std::atomic<int> successes{0};
    std::atomic<int> conflicts{0};
    auto worker = [&](int id) {
        TcpClient c("127.0.0.1", server.port());
        // Private object: must always succeed.
        CommitBatch own;
        own.writes.push_back(WriteOp::create(to_bytes("worker" + std::to_string(id))));
        auto oid = c.commit(own).versions[0].first;
        for (int v = 1; v <= 10; ++v) {
            CommitBatch b;
            b.writes.push_back(WriteOp::overwrite(oid, v, to_bytes("v" + std::to_string(v))));
            c.commit(b);
        }
        // Contended object: retry loop, count outcomes.
        for (int i = 0; i < 20; ++i) {
            for (;;) {
                auto cur = c.get_objects({shared_oid})[0];
                CommitBatch b;
                b.writes.push_back(WriteOp::overwrite(shared_oid, cur.version, to_bytes("w")));
                try {
                    c.commit(b);
                    successes.fetch_add(1);
                    break;
                } catch (const ConflictError&) {
                    conflicts.fetch_add(1);
                }
            }
        }
    };
    std::vector<std::thread> threads;
    for (int t = 0; t < 4; ++t) threads.emplace_back(worker, t);
    for (auto& t : threads) t.join();

    CHECK(successes.load() == 80);
    // Version sequence has no gaps: final version = initial 1 + successes.
    TcpClient check("127.0.0.1", server.port());
    CHECK(check.get_objects({shared_oid})[0].version == 81);
    server.stop();
}

TEST_CASE("server never sees plaintext: sentinel sweep over disk state") {
    TmpDir dir;
    std::vector<Bytes> sentinels;
    {
        ObjectStore store(dir.file("store.log"));
        LocalClient client(store);
        auto key = crypto::SymmetricKey::random();
        std::mt19937_64 rng(31337);
        for (int i = 0; i < 1000; ++i) {
            Bytes sentinel = crypto::random_bytes(16);
            sentinels.push_back(sentinel);
            Bytes record = to_bytes("record-" + std::to_string(i) + ":");
            append(record, sentinel);
            CommitBatch batch;
            batch.writes.push_back(
                WriteOp::create(crypto::encrypt_blob(key, record, {}).encode()));
            client.commit(batch);
        }
    }

    for (const auto& entry : std::filesystem::directory_iterator(dir.path())) {
        auto data = file_contents(entry.path().string());
        for (const auto& s : sentinels) CHECK_FALSE(contains(data, s));
    }
}
