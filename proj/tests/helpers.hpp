#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "rest/kg.hpp"
#include "rest/subgraph.hpp"

namespace rest::testing {

inline RelationVocab make_relations(std::size_t base_count) {
    RelationVocab vocab;
    for (std::size_t i = 0; i < base_count; ++i) vocab.intern("rel" + std::to_string(i));
    return vocab;
}

// Subgraph built edge-by-edge, bypassing extraction, for fixtures.
inline Subgraph make_subgraph(std::size_t nodes,
                              const std::vector<std::tuple<std::uint32_t, RelationId, std::uint32_t>>&
                                  edges_after_query,
                              std::uint32_t u, RelationId r_t, std::uint32_t v,
                              std::uint32_t hops = 3) {
    Subgraph sg;
    sg.hops = hops;
    sg.global_ids.resize(nodes);
    for (std::size_t i = 0; i < nodes; ++i) sg.global_ids[i] = static_cast<EntityId>(i);
    sg.edges.push_back({u, r_t, v, kQueryEdgeOrigin});
    sg.query_edge = 0;
    std::int64_t origin = 0;
    for (const auto& [s, r, d] : edges_after_query) sg.edges.push_back({s, r, d, origin++});
    return sg;
}

// Query (0 -r0-> 1) plus return edge (1 -r1-> 0).
inline Subgraph two_cycle_subgraph() { return make_subgraph(2, {{1, 1, 0}}, 0, 0, 1); }

// Query (0 -r0-> 1), (1 -r1-> 2), (2 -r2-> 0).
inline Subgraph triangle_subgraph() { return make_subgraph(3, {{1, 1, 2}, {2, 2, 0}}, 0, 0, 1); }

// Independent BFS over undirected edges; the khop oracle.
inline std::vector<EntityId> bfs_oracle(const KnowledgeGraph& g, EntityId start, std::uint32_t k) {
    std::map<EntityId, std::uint32_t> dist;
    dist[start] = 0;
    std::vector<EntityId> queue{start};
    for (std::size_t qi = 0; qi < queue.size(); ++qi) {
        EntityId n = queue[qi];
        if (dist[n] == k) continue;
        for (const Triple& t : g.triples()) {
            EntityId other;
            if (t.head == n) other = t.tail;
            else if (t.tail == n) other = t.head;
            else continue;
            if (!dist.count(other)) {
                dist[other] = dist[n] + 1;
                queue.push_back(other);
            }
        }
    }
    std::vector<EntityId> out;
    for (const auto& [node, d] : dist) out.push_back(node);
    return out;  // std::map keeps it sorted
}

// Exhaustive closed-walk oracle: builds every edge sequence of length <= max_len
// that starts with the query edge, then keeps the connected ones ending at u.
inline std::vector<std::vector<std::uint32_t>> walk_oracle(const Subgraph& sg,
                                                           std::size_t max_len) {
    std::vector<std::vector<std::uint32_t>> found;
    std::vector<std::vector<std::uint32_t>> frontier{{sg.query_edge}};
    const std::uint32_t u = sg.query_src();
    for (std::size_t len = 1; len <= max_len; ++len) {
        std::vector<std::vector<std::uint32_t>> next;
        for (const auto& seq : frontier) {
            std::uint32_t tail_node = sg.edges[seq.back()].dst;
            if (len >= 2 && tail_node == u) found.push_back(seq);
            if (len == max_len) continue;
            for (std::uint32_t e = 0; e < sg.edges.size(); ++e) {
                if (sg.edges[e].src != tail_node) continue;
                auto extended = seq;
                extended.push_back(e);
                next.push_back(std::move(extended));
            }
        }
        frontier = std::move(next);
    }
    return found;
}

// Literal transcription of the per-layer recurrence over plain integers,
// structured differently from the library path (dst-major aggregation).
inline long long int_forward_oracle(const Subgraph& sg, std::size_t layers,
                                    const std::vector<long long>& rel_values, bool full_init) {
    const std::size_t n = sg.node_count(), m = sg.edges.size();
    std::vector<long long> e(m, 0);
    if (full_init) {
        for (std::size_t i = 0; i < m; ++i) e[i] = rel_values[sg.edges[i].rel];
    } else {
        e[sg.query_edge] = rel_values[sg.query_rel()];
    }
    std::vector<long long> h(n, 0);
    for (std::size_t layer = 0; layer < layers; ++layer) {
        std::vector<long long> h_next(n, 0);
        for (std::uint32_t z = 0; z < n; ++z) {
            long long acc = 0;
            for (std::size_t i = 0; i < m; ++i) {
                if (sg.edges[i].dst != z) continue;
                long long r = rel_values[sg.edges[i].rel];
                acc += h[sg.edges[i].src] * r + e[i] * r;
            }
            h_next[z] = acc;
        }
        std::vector<long long> e_next(m);
        for (std::size_t i = 0; i < m; ++i) e_next[i] = h_next[sg.edges[i].src] + e[i];
        e = std::move(e_next);
        h = std::move(h_next);
    }
    return e[sg.query_edge];
}

class TempDir {
public:
    TempDir() {
        auto base = std::filesystem::temp_directory_path();
        std::mt19937_64 rng(std::random_device{}());
        path_ = base / ("rest_test_" + std::to_string(rng()));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
};

inline void write_file(const std::filesystem::path& p, const std::string& content) {
    std::ofstream out(p);
    out << content;
}

}  // namespace rest::testing
