#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rest/kg.hpp"

namespace rest {

enum class Scope { enclosing, unclosing };

struct ExtractionConfig {
    std::uint32_t hops = 3;
    Scope scope = Scope::enclosing;
    std::optional<std::size_t> max_nodes;
};

// Marks the inserted query edge in SubEdge::origin.
inline constexpr std::int64_t kQueryEdgeOrigin = -1;

struct SubEdge {
    std::uint32_t src;          // local node index
    RelationId rel;
    std::uint32_t dst;          // local node index
    std::int64_t origin;        // parent edge index, or kQueryEdgeOrigin
};

// Locally re-indexed induced subgraph with one distinguished query edge.
// Local node indices ascend by global entity id; the query edge is stored
// first (query_edge == 0) followed by induced edges in parent scan order.
struct Subgraph {
    std::vector<EntityId> global_ids;
    std::vector<SubEdge> edges;
    std::uint32_t query_edge = 0;
    std::uint32_t hops = 0;

    std::size_t node_count() const noexcept { return global_ids.size(); }
    const SubEdge& query() const { return edges[query_edge]; }
    std::uint32_t query_src() const { return edges[query_edge].src; }
    std::uint32_t query_dst() const { return edges[query_edge].dst; }
    RelationId query_rel() const { return edges[query_edge].rel; }
};

// All entities within k undirected hops of node, including node itself,
// returned sorted ascending.
std::vector<EntityId> khop_neighbors(const KnowledgeGraph& graph, EntityId node, std::uint32_t k);

struct ExtractionError : DataError {
    ExtractionError(std::size_t size, std::size_t cap)
        : DataError("subgraph node count " + std::to_string(size) + " exceeds max_nodes " +
                    std::to_string(cap)),
          size(size) {}
    std::size_t size;
};

// Extracts the k-hop subgraph around query (u, r_t, v). The node set is the
// intersection (enclosing) or union (unclosing) of the endpoints' k-hop
// neighborhoods, with u and v always included. Every parent edge among those
// nodes is kept except copies of the query triple and of its inverse
// companion; one fresh query edge is inserted and marked. No node labels are
// computed.
Subgraph extract(const KnowledgeGraph& graph, EntityId u, RelationId r_t, EntityId v,
                 const RelationVocab& vocab, const ExtractionConfig& cfg);

inline constexpr std::int32_t kUnreachable = -1;

struct NodeLabel {
    std::int32_t dist_u = kUnreachable;
    std::int32_t dist_v = kUnreachable;

    friend bool operator==(const NodeLabel&, const NodeLabel&) = default;
};

// Per-node (distance to u, distance to v) over undirected subgraph edges,
// via two breadth-first passes. Timing baseline only; the extraction path
// never calls this.
std::vector<NodeLabel> double_radius_label(const Subgraph& sg, std::uint32_t u_local,
                                           std::uint32_t v_local);

struct BenchReport {
    std::size_t queries = 0;
    std::size_t repeats = 0;
    double unlabeled_seconds = 0.0;
    double unlabeled_mean_ms = 0.0;
    double labeled_seconds = 0.0;     // populated when with_labeling
    double labeled_mean_ms = 0.0;
    double speedup = 0.0;             // labeled / unlabeled, when both ran
    bool with_labeling = false;
};

// Single-threaded wall-clock timing of extraction over the query list,
// optionally also timing the double-radius-labeled variant for comparison.
BenchReport bench_extract(const KnowledgeGraph& graph, const std::vector<Triple>& queries,
                          const RelationVocab& vocab, const ExtractionConfig& cfg,
                          bool with_labeling, std::size_t repeats);

}  // namespace rest
