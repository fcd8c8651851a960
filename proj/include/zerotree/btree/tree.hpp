#pragma once

// Client-side encrypted B-Tree session: remote incremental traversal,
// staged mutation with split/commit, bulk subtree fetch, parallel
// traversal, and range/count operations.
//
// Every bucket is encrypted under a chain key: the root key is derived
// from the tree's anchor key with the root oid as label, and each child
// key is derived from its parent's key with the child oid as label. The
// child oids recorded inside a branch double as the derivation labels, so
// holding one bucket's key unlocks exactly its subtree.

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "zerotree/btree/cache.hpp"
#include "zerotree/btree/keycodec.hpp"
#include "zerotree/btree/node.hpp"
#include "zerotree/crypto.hpp"
#include "zerotree/wire/client.hpp"

namespace zerotree::btree {

struct TreeConfig {
    // s_b: post-compression bucket size target, bytes.
    size_t bucket_size_target = 8192;
    // Split when serialized plaintext exceeds s_b * assumed_compression.
    double assumed_compression = 1.0;
    // Values above this many bytes become separate encrypted objects.
    size_t inline_value_max = 256;

    size_t plaintext_split_threshold() const {
        return static_cast<size_t>(static_cast<double>(bucket_size_target) * assumed_compression);
    }
};

class Tree;

// One logical client: a connection, a bucket cache, and the master key
// anchoring every tree opened through it.
class Session {
public:
    Session(wire::Client& client, crypto::SymmetricKey master_key, TreeConfig config,
            size_t cache_bytes);

    // Named top-level trees (root registered with the server).
    Tree create_tree(const std::string& index_name);
    Tree open_tree(const std::string& index_name);  // throws NotFoundError

    // Anonymous nested trees: the caller stores the returned root oid.
    Tree create_subtree();
    Tree open_subtree(ObjectId root);

    wire::Client& client() { return *client_; }
    ClientCache& cache() { return cache_; }
    const crypto::SymmetricKey& master_key() const { return master_key_; }
    const TreeConfig& config() const { return config_; }

    // Stages from several trees committed as one atomic batch.
    std::vector<ObjectId> commit_trees(const std::vector<Tree*>& trees);

private:
    wire::Client* client_;
    crypto::SymmetricKey master_key_;
    TreeConfig config_;
    ClientCache cache_;
};

// A decrypted bucket in hand, with the chain key it decrypts under.
struct LoadedNode {
    std::shared_ptr<const BucketNode> node;
    crypto::SymmetricKey key;
    std::uint64_t version = 0;
    NodeRef ref = kNullOid;
};

struct MaterializedSubtree {
    std::vector<std::pair<Bytes, Bytes>> entries;  // key order
    size_t bucket_count = 0;
    size_t height = 0;
};

class RangeCursor;

class Tree {
public:
    // --- reads (see staged changes; fetch one bucket per uncached level) ---
    std::optional<Bytes> search(BytesView key);
    std::map<Bytes, std::optional<Bytes>> parallel_traverse(const std::vector<Bytes>& keys);
    std::vector<std::pair<Bytes, Bytes>> range_iterate(const KeyRange& range, size_t limit);
    std::vector<std::pair<Bytes, Bytes>> range_fetch_all(const KeyRange& range);
    std::uint64_t estimate_count(const KeyRange& range);
    size_t height();
    MaterializedSubtree bulk_fetch_subtree();  // whole tree
    MaterializedSubtree bulk_fetch_subtree(NodeRef subtree_root, const crypto::SymmetricKey& key);
    void prefetch(const std::vector<Bytes>& keys);
    RangeCursor cursor(const KeyRange& range);

    // --- staged writes ---
    void insert(Bytes key, Bytes value);
    void erase(BytesView key);
    bool has_staged_changes() const { return !tx_.empty() || root_moved_; }
    void discard_changes();

    // Applies all staged changes as one commit (two server batches when
    // fresh buckets need oids first); returns the tree's root oid.
    // Throws ConflictError after rolling staged state back; the caller
    // retries the whole transaction.
    ObjectId commit_changes();

    ObjectId root() const { return root_ref_; }
    const std::string& name() const { return name_; }
    crypto::SymmetricKey root_key() const;
    LoadedNode load_root();
    LoadedNode load_child(const LoadedNode& parent, size_t child_index);
    const TreeConfig& config() const { return session_->config(); }

    // Resolves a leaf entry to its value bytes (fetching value objects).
    Bytes read_value(const LoadedNode& leaf, size_t index);

private:
    friend class Session;
    friend class RangeCursor;

    Tree(Session& session, std::string name, NodeRef root, crypto::SymmetricKey anchor,
         bool named_root);

    struct TxEntry {
        std::shared_ptr<BucketNode> node;
        std::uint64_t base_version = 0;     // server version at load; 0 for new
        crypto::SymmetricKey loaded_key;    // server-side chain key at load
        bool is_new = false;
    };

    struct PathStep {
        NodeRef ref;
        size_t child_index;
    };

    // Staging plumbing.
    LoadedNode load(NodeRef ref, const crypto::SymmetricKey& server_key);
    std::vector<LoadedNode> load_many(
        const std::vector<std::pair<NodeRef, crypto::SymmetricKey>>& refs);
    crypto::SymmetricKey child_server_key(const LoadedNode& parent, NodeRef child) const;
    LoadedNode descend_to_leaf(BytesView key, std::vector<PathStep>* path);
    TxEntry& make_writable(const LoadedNode& loaded);
    NodeRef new_pending_node(NodeKind kind);
    void split_if_needed(NodeRef leaf_ref, std::vector<PathStep> path);
    void split_node(NodeRef ref, std::vector<PathStep>& path);
    void remove_upward(NodeRef ref, std::vector<PathStep> path);
    void mark_moved_child(const TxEntry& old_parent, NodeRef child, NodeRef new_parent);
    void mark_moved_value(const TxEntry& old_leaf, const LeafValue& value, NodeRef new_leaf);
    LeafValue stage_value(Bytes value);

    // Commit plumbing.
    void resolve_pending(const std::unordered_map<std::uint64_t, ObjectId>& assigned);
    void collect_pending(std::vector<std::uint64_t>& ordinals) const;
    crypto::SymmetricKey final_key(NodeRef ref,
                                   std::unordered_map<NodeRef, crypto::SymmetricKey>& memo);
    void emit_writes(wire::CommitBatch& batch,
                     std::vector<std::pair<ObjectId, ClientCache::Entry>>& cache_updates);
    void emit_subtree(NodeRef ref, const crypto::SymmetricKey& final,
                      const crypto::SymmetricKey* server_key, wire::CommitBatch& batch,
                      std::vector<std::pair<ObjectId, ClientCache::Entry>>& cache_updates,
                      std::unordered_map<NodeRef, bool>& handled);
    void after_commit(const std::vector<std::pair<ObjectId, ClientCache::Entry>>& cache_updates);
    void rollback();

    Session* session_;
    std::string name_;
    NodeRef root_ref_;
    crypto::SymmetricKey anchor_key_;
    bool named_root_;
    bool root_moved_ = false;  // root ref changed or tree newly created

    std::unordered_map<NodeRef, TxEntry> tx_;
    std::uint64_t next_pending_ = 0;
    // Subtrees whose ancestry changed: server-side chain key they are
    // still encrypted under.
    std::unordered_map<NodeRef, crypto::SymmetricKey> rekey_old_keys_;
    // ref -> parent ref, tracked for new nodes and relocated subtrees.
    std::unordered_map<NodeRef, NodeRef> parent_of_;
    // Plaintext of value objects created in this transaction.
    std::unordered_map<NodeRef, Bytes> pending_values_;
    // Value objects whose owning leaf changed: old chain key.
    std::unordered_map<NodeRef, crypto::SymmetricKey> moved_value_old_keys_;
};

// Lazy in-order iteration over a key range; fetches sibling leaves only
// as the caller advances.
class RangeCursor {
public:
    // (key, leaf, index-in-leaf); value read on demand.
    struct Item {
        Bytes key;
        Bytes value;
    };
    std::optional<Item> next();

private:
    friend class Tree;
    RangeCursor(Tree& tree, KeyRange range);
    void descend_first();
    bool advance_leaf();

    Tree* tree_;
    KeyRange range_;
    std::vector<std::pair<LoadedNode, size_t>> stack_;  // branches + child idx
    std::optional<LoadedNode> leaf_;
    size_t entry_ = 0;
    bool done_ = false;
};

}  // namespace zerotree::btree
