#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "rest/errors.hpp"

namespace rest {

using EntityId = std::uint32_t;
using RelationId = std::uint32_t;
using EdgeIndex = std::uint32_t;

struct Triple {
    EntityId head = 0;
    RelationId rel = 0;
    EntityId tail = 0;

    friend bool operator==(const Triple&, const Triple&) = default;
};

// Dense string<->id mapping, ids assigned in first-seen order.
class EntityVocab {
public:
    EntityId intern(const std::string& name);
    std::optional<EntityId> find(const std::string& name) const;
    const std::string& name(EntityId id) const;
    std::size_t size() const noexcept { return names_.size(); }

private:
    std::vector<std::string> names_;
    std::unordered_map<std::string, EntityId> index_;
};

// Relation vocabulary over base relations; the inverse of base relation r
// lives at id r + base_count, so augmented ids are dense in [0, 2*base_count).
class RelationVocab {
public:
    RelationId intern(const std::string& name);
    std::optional<RelationId> find(const std::string& name) const;

    std::size_t base_count() const noexcept { return names_.size(); }
    std::size_t augmented_count() const noexcept { return 2 * names_.size(); }

    bool is_inverse(RelationId r) const { return r >= base_count(); }
    RelationId inverse_of(RelationId r) const;

    // Base relations print as stored; inverse ids print as "<name>^-1".
    std::string name(RelationId r) const;

    const std::vector<std::string>& base_names() const noexcept { return names_; }

private:
    std::vector<std::string> names_;
    std::unordered_map<std::string, RelationId> index_;
};

struct AdjEntry {
    RelationId rel;
    EntityId other;   // tail for out_adj, head for in_adj
    EdgeIndex edge;
};

// Immutable directed multigraph over dense entity ids. Once constructed it is
// safe to share across concurrent readers.
class KnowledgeGraph {
public:
    KnowledgeGraph() = default;
    KnowledgeGraph(std::size_t entity_count, std::vector<Triple> triples);

    std::size_t entity_count() const noexcept { return entity_count_; }
    std::size_t edge_count() const noexcept { return triples_.size(); }
    const std::vector<Triple>& triples() const noexcept { return triples_; }
    const Triple& edge(EdgeIndex e) const { return triples_[e]; }

    std::span<const AdjEntry> out_edges(EntityId node) const;
    std::span<const AdjEntry> in_edges(EntityId node) const;

    bool has_triple(EntityId h, RelationId r, EntityId t) const;
    bool has_triple(const Triple& t) const { return has_triple(t.head, t.rel, t.tail); }

private:
    std::size_t entity_count_ = 0;
    std::vector<Triple> triples_;
    std::vector<std::vector<AdjEntry>> out_adj_;
    std::vector<std::vector<AdjEntry>> in_adj_;
    std::unordered_set<std::uint64_t> triple_set_;
};

// Builds the adjacency-indexed graph. When add_inverses is set every input
// triple (h, r, t) with base relation r gains a companion (t, r + base, h)
// and the edge count doubles. Ids out of range raise DataError.
KnowledgeGraph build_graph(const std::vector<Triple>& triples, std::size_t entity_count,
                           const RelationVocab& vocab, bool add_inverses);

// Controls whether unseen relation names extend the vocabulary or fail.
enum class RelationPolicy { extend, require_known };

// Parses "head<TAB>relation<TAB>tail" lines, extending the vocabularies in
// place (entity ids first-seen order). Malformed lines raise DataError naming
// the line number; with RelationPolicy::require_known, unknown relations are
// collected and reported in one error.
std::vector<Triple> load_triples(const std::filesystem::path& path, EntityVocab& entities,
                                 RelationVocab& relations,
                                 RelationPolicy policy = RelationPolicy::extend);

// Inverse of load_triples for fixtures and dataset dumps.
void write_triples(const std::filesystem::path& path, const std::vector<Triple>& triples,
                   const EntityVocab& entities, const RelationVocab& relations);

// Triples of the graph whose relation id is a base id (drops materialized inverses).
std::vector<Triple> base_triples(const KnowledgeGraph& graph, const RelationVocab& relations);

enum class DatasetMode { transductive, inductive };

struct DatasetBundle {
    DatasetMode mode = DatasetMode::inductive;
    RelationVocab relations;              // shared across train and test graphs
    EntityVocab train_entities;
    EntityVocab test_entities;            // == train_entities in transductive mode
    KnowledgeGraph train_graph;
    KnowledgeGraph test_graph;            // == train_graph in transductive mode
    std::vector<Triple> valid_triples;    // ranked against train_graph
    std::vector<Triple> test_triples;     // ranked against test_graph
};

// Directory layout: train.txt / valid.txt (+ test split rules below).
// transductive: a seeded uniform 10% of train.txt is held out as test triples
//               and the remaining 90% forms both graphs.
// inductive:    train_ind.txt builds the test graph over a fresh entity
//               namespace and test_ind.txt provides the test triples; every
//               relation must already exist in the train vocabulary.
DatasetBundle load_dataset(const std::filesystem::path& dir, DatasetMode mode,
                           bool add_inverses, std::uint64_t transductive_split_seed = 0);

}  // namespace rest
