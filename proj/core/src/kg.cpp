#include "rest/kg.hpp"

#include <algorithm>
#include <array>
#include <fstream>
#include <random>
#include <sstream>

namespace rest {

namespace {

// Packed (h, r, t) key for the membership set. Desk-scale graphs fit easily;
// the limits are checked at construction.
constexpr std::uint32_t kMaxEntities = 1u << 24;
constexpr std::uint32_t kMaxRelations = 1u << 16;

std::uint64_t pack_triple(EntityId h, RelationId r, EntityId t) {
    return (static_cast<std::uint64_t>(h) << 40) | (static_cast<std::uint64_t>(r) << 24) |
           static_cast<std::uint64_t>(t);
}

}  // namespace

EntityId EntityVocab::intern(const std::string& name) {
    auto it = index_.find(name);
    if (it != index_.end()) return it->second;
    auto id = static_cast<EntityId>(names_.size());
    names_.push_back(name);
    index_.emplace(name, id);
    return id;
}

std::optional<EntityId> EntityVocab::find(const std::string& name) const {
    auto it = index_.find(name);
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

const std::string& EntityVocab::name(EntityId id) const {
    if (id >= names_.size()) throw DataError("entity id out of range: " + std::to_string(id));
    return names_[id];
}

RelationId RelationVocab::intern(const std::string& name) {
    auto it = index_.find(name);
    if (it != index_.end()) return it->second;
    auto id = static_cast<RelationId>(names_.size());
    names_.push_back(name);
    index_.emplace(name, id);
    return id;
}

std::optional<RelationId> RelationVocab::find(const std::string& name) const {
    auto it = index_.find(name);
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

RelationId RelationVocab::inverse_of(RelationId r) const {
    auto base = static_cast<RelationId>(base_count());
    if (r >= 2 * base) throw DataError("relation id out of range: " + std::to_string(r));
    return r < base ? r + base : r - base;
}

std::string RelationVocab::name(RelationId r) const {
    auto base = static_cast<RelationId>(base_count());
    if (r >= 2 * base) throw DataError("relation id out of range: " + std::to_string(r));
    return r < base ? names_[r] : names_[r - base] + "^-1";
}

KnowledgeGraph::KnowledgeGraph(std::size_t entity_count, std::vector<Triple> triples)
    : entity_count_(entity_count), triples_(std::move(triples)) {
    if (entity_count_ >= kMaxEntities)
        throw DataError("entity count exceeds supported maximum");
    out_adj_.resize(entity_count_);
    in_adj_.resize(entity_count_);
    triple_set_.reserve(triples_.size());
    for (EdgeIndex e = 0; e < triples_.size(); ++e) {
        const Triple& t = triples_[e];
        if (t.head >= entity_count_ || t.tail >= entity_count_)
            throw DataError("entity id out of range in triple " + std::to_string(e));
        if (t.rel >= kMaxRelations)
            throw DataError("relation id exceeds supported maximum");
        out_adj_[t.head].push_back({t.rel, t.tail, e});
        in_adj_[t.tail].push_back({t.rel, t.head, e});
        triple_set_.insert(pack_triple(t.head, t.rel, t.tail));
    }
}

std::span<const AdjEntry> KnowledgeGraph::out_edges(EntityId node) const {
    if (node >= entity_count_) throw DataError("entity id out of range: " + std::to_string(node));
    return out_adj_[node];
}

std::span<const AdjEntry> KnowledgeGraph::in_edges(EntityId node) const {
    if (node >= entity_count_) throw DataError("entity id out of range: " + std::to_string(node));
    return in_adj_[node];
}

bool KnowledgeGraph::has_triple(EntityId h, RelationId r, EntityId t) const {
    return triple_set_.contains(pack_triple(h, r, t));
}

KnowledgeGraph build_graph(const std::vector<Triple>& triples, std::size_t entity_count,
                           const RelationVocab& vocab, bool add_inverses) {
    auto base = static_cast<RelationId>(vocab.base_count());
    auto limit = add_inverses ? base : static_cast<RelationId>(vocab.augmented_count());
    std::vector<Triple> edges;
    edges.reserve(add_inverses ? 2 * triples.size() : triples.size());
    for (const Triple& t : triples) {
        if (t.head >= entity_count || t.tail >= entity_count)
            throw DataError("entity id out of range in input triple");
        if (t.rel >= limit)
            throw DataError("relation id out of range in input triple: " + std::to_string(t.rel));
        edges.push_back(t);
    }
    if (add_inverses) {
        for (const Triple& t : triples)
            edges.push_back({t.tail, static_cast<RelationId>(t.rel + base), t.head});
    }
    return KnowledgeGraph(entity_count, std::move(edges));
}

std::vector<Triple> load_triples(const std::filesystem::path& path, EntityVocab& entities,
                                 RelationVocab& relations, RelationPolicy policy) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open triple file: " + path.string());

    std::vector<Triple> triples;
    std::vector<std::string> unknown_relations;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;

        std::array<std::string, 3> fields;
        std::size_t start = 0, field = 0;
        bool ok = true;
        for (std::size_t i = 0; i <= line.size(); ++i) {
            if (i == line.size() || line[i] == '\t') {
                if (field >= 3) { ok = false; break; }
                fields[field++] = line.substr(start, i - start);
                start = i + 1;
            }
        }
        if (!ok || field != 3 || fields[0].empty() || fields[1].empty() || fields[2].empty())
            throw DataError("malformed triple line " + std::to_string(line_no) + " in " +
                            path.string());

        RelationId rel;
        if (policy == RelationPolicy::require_known) {
            auto found = relations.find(fields[1]);
            if (!found) {
                unknown_relations.push_back(fields[1]);
                continue;
            }
            rel = *found;
        } else {
            rel = relations.intern(fields[1]);
        }
        EntityId h = entities.intern(fields[0]);
        EntityId t = entities.intern(fields[2]);
        triples.push_back({h, rel, t});
    }

    if (!unknown_relations.empty()) {
        std::sort(unknown_relations.begin(), unknown_relations.end());
        unknown_relations.erase(std::unique(unknown_relations.begin(), unknown_relations.end()),
                                unknown_relations.end());
        std::ostringstream msg;
        msg << "relations absent from train vocabulary in " << path.string() << ":";
        for (const auto& r : unknown_relations) msg << ' ' << r;
        throw DataError(msg.str());
    }
    return triples;
}

void write_triples(const std::filesystem::path& path, const std::vector<Triple>& triples,
                   const EntityVocab& entities, const RelationVocab& relations) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot open file for writing: " + path.string());
    for (const Triple& t : triples)
        out << entities.name(t.head) << '\t' << relations.name(t.rel) << '\t'
            << entities.name(t.tail) << '\n';
    if (!out) throw DataError("write failed: " + path.string());
}

std::vector<Triple> base_triples(const KnowledgeGraph& graph, const RelationVocab& relations) {
    std::vector<Triple> out;
    for (const Triple& t : graph.triples())
        if (t.rel < relations.base_count()) out.push_back(t);
    return out;
}

namespace {

std::filesystem::path require_file(const std::filesystem::path& dir, const char* name) {
    auto p = dir / name;
    if (!std::filesystem::exists(p)) throw DataError("missing required dataset file: " + p.string());
    return p;
}

}  // namespace

DatasetBundle load_dataset(const std::filesystem::path& dir, DatasetMode mode, bool add_inverses,
                           std::uint64_t transductive_split_seed) {
    DatasetBundle bundle;
    bundle.mode = mode;

    auto train_path = require_file(dir, "train.txt");
    auto valid_path = require_file(dir, "valid.txt");

    auto train_triples = load_triples(train_path, bundle.train_entities, bundle.relations);
    bundle.valid_triples = load_triples(valid_path, bundle.train_entities, bundle.relations,
                                        RelationPolicy::require_known);

    if (mode == DatasetMode::transductive) {
        // Appendix-D style split: a seeded uniform 10% of the train links are
        // held out as test triples; the remaining 90% forms the graph.
        std::vector<std::size_t> order(train_triples.size());
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
        std::mt19937_64 rng(transductive_split_seed);
        std::shuffle(order.begin(), order.end(), rng);
        std::size_t held_out = train_triples.size() / 10;

        std::vector<Triple> kept, held;
        std::vector<bool> is_held(train_triples.size(), false);
        for (std::size_t i = 0; i < held_out; ++i) is_held[order[i]] = true;
        for (std::size_t i = 0; i < train_triples.size(); ++i)
            (is_held[i] ? held : kept).push_back(train_triples[i]);

        bundle.train_graph =
            build_graph(kept, bundle.train_entities.size(), bundle.relations, add_inverses);
        bundle.test_graph = bundle.train_graph;
        bundle.test_entities = bundle.train_entities;
        bundle.test_triples = std::move(held);
        return bundle;
    }

    auto train_ind_path = require_file(dir, "train_ind.txt");
    auto test_ind_path = require_file(dir, "test_ind.txt");

    bundle.train_graph =
        build_graph(train_triples, bundle.train_entities.size(), bundle.relations, add_inverses);

    // Fresh entity namespace, shared relation vocabulary.
    auto test_graph_triples = load_triples(train_ind_path, bundle.test_entities, bundle.relations,
                                           RelationPolicy::require_known);
    bundle.test_triples = load_triples(test_ind_path, bundle.test_entities, bundle.relations,
                                       RelationPolicy::require_known);
    bundle.test_graph = build_graph(test_graph_triples, bundle.test_entities.size(),
                                    bundle.relations, add_inverses);
    return bundle;
}

}  // namespace rest
