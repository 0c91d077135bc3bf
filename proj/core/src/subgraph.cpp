#include "rest/subgraph.hpp"

#include <algorithm>
#include <chrono>
#include <queue>

namespace rest {

std::vector<EntityId> khop_neighbors(const KnowledgeGraph& graph, EntityId node, std::uint32_t k) {
    if (node >= graph.entity_count())
        throw DataError("entity id out of range: " + std::to_string(node));

    std::vector<std::uint32_t> dist(graph.entity_count(), UINT32_MAX);
    std::vector<EntityId> frontier{node}, next;
    dist[node] = 0;
    std::vector<EntityId> result{node};
    for (std::uint32_t level = 1; level <= k && !frontier.empty(); ++level) {
        next.clear();
        for (EntityId n : frontier) {
            auto visit = [&](EntityId other) {
                if (dist[other] == UINT32_MAX) {
                    dist[other] = level;
                    next.push_back(other);
                    result.push_back(other);
                }
            };
            for (const AdjEntry& a : graph.out_edges(n)) visit(a.other);
            for (const AdjEntry& a : graph.in_edges(n)) visit(a.other);
        }
        frontier.swap(next);
    }
    std::sort(result.begin(), result.end());
    return result;
}

Subgraph extract(const KnowledgeGraph& graph, EntityId u, RelationId r_t, EntityId v,
                 const RelationVocab& vocab, const ExtractionConfig& cfg) {
    if (u == v) throw DataError("query endpoints must differ");
    if (r_t >= vocab.base_count())
        throw DataError("query relation must be a base relation id, got " + std::to_string(r_t));
    if (cfg.hops < 1) throw ConfigError("hops must be >= 1");

    auto near_u = khop_neighbors(graph, u, cfg.hops);
    auto near_v = khop_neighbors(graph, v, cfg.hops);

    std::vector<EntityId> nodes;
    if (cfg.scope == Scope::enclosing) {
        std::set_intersection(near_u.begin(), near_u.end(), near_v.begin(), near_v.end(),
                              std::back_inserter(nodes));
    } else {
        std::set_union(near_u.begin(), near_u.end(), near_v.begin(), near_v.end(),
                       std::back_inserter(nodes));
    }
    // u and v are force-included so the query edge is always well-formed.
    for (EntityId endpoint : {u, v}) {
        auto it = std::lower_bound(nodes.begin(), nodes.end(), endpoint);
        if (it == nodes.end() || *it != endpoint) nodes.insert(it, endpoint);
    }
    if (cfg.max_nodes && nodes.size() > *cfg.max_nodes)
        throw ExtractionError(nodes.size(), *cfg.max_nodes);

    Subgraph sg;
    sg.hops = cfg.hops;
    sg.global_ids = nodes;

    std::vector<std::int64_t> local_of(graph.entity_count(), -1);
    for (std::size_t i = 0; i < nodes.size(); ++i) local_of[nodes[i]] = static_cast<std::int64_t>(i);

    auto u_local = static_cast<std::uint32_t>(local_of[u]);
    auto v_local = static_cast<std::uint32_t>(local_of[v]);
    sg.edges.push_back({u_local, r_t, v_local, kQueryEdgeOrigin});
    sg.query_edge = 0;

    RelationId r_inv = vocab.inverse_of(r_t);
    for (EntityId src : nodes) {
        for (const AdjEntry& a : graph.out_edges(src)) {
            if (local_of[a.other] < 0) continue;
            // Drop every copy of the query triple and of its inverse companion
            // so positives cannot leak their own label.
            if (src == u && a.rel == r_t && a.other == v) continue;
            if (src == v && a.rel == r_inv && a.other == u) continue;
            sg.edges.push_back({static_cast<std::uint32_t>(local_of[src]), a.rel,
                                static_cast<std::uint32_t>(local_of[a.other]),
                                static_cast<std::int64_t>(a.edge)});
        }
    }
    return sg;
}

std::vector<NodeLabel> double_radius_label(const Subgraph& sg, std::uint32_t u_local,
                                           std::uint32_t v_local) {
    const std::size_t n = sg.node_count();
    if (u_local >= n || v_local >= n) throw DataError("local node index out of range");

    std::vector<std::vector<std::uint32_t>> adj(n);
    for (const SubEdge& e : sg.edges) {
        adj[e.src].push_back(e.dst);
        adj[e.dst].push_back(e.src);
    }

    auto bfs = [&](std::uint32_t start, auto&& assign) {
        std::vector<std::int32_t> d(n, kUnreachable);
        std::queue<std::uint32_t> q;
        d[start] = 0;
        q.push(start);
        while (!q.empty()) {
            auto cur = q.front();
            q.pop();
            for (auto nb : adj[cur]) {
                if (d[nb] == kUnreachable) {
                    d[nb] = d[cur] + 1;
                    q.push(nb);
                }
            }
        }
        for (std::size_t i = 0; i < n; ++i) assign(i, d[i]);
    };

    std::vector<NodeLabel> labels(n);
    bfs(u_local, [&](std::size_t i, std::int32_t d) { labels[i].dist_u = d; });
    bfs(v_local, [&](std::size_t i, std::int32_t d) { labels[i].dist_v = d; });
    return labels;
}

BenchReport bench_extract(const KnowledgeGraph& graph, const std::vector<Triple>& queries,
                          const RelationVocab& vocab, const ExtractionConfig& cfg,
                          bool with_labeling, std::size_t repeats) {
    if (queries.empty()) throw DataError("bench_extract requires at least one query");
    if (repeats < 1) throw ConfigError("repeats must be >= 1");

    using clock = std::chrono::steady_clock;
    volatile std::size_t sink = 0;  // keep the extraction alive under -O2

    BenchReport report;
    report.queries = queries.size();
    report.repeats = repeats;
    report.with_labeling = with_labeling;

    auto t0 = clock::now();
    for (std::size_t r = 0; r < repeats; ++r) {
        for (const Triple& q : queries) {
            Subgraph sg = extract(graph, q.head, q.rel, q.tail, vocab, cfg);
            sink = sink + sg.edges.size();
        }
    }
    auto t1 = clock::now();
    report.unlabeled_seconds = std::chrono::duration<double>(t1 - t0).count();
    const double runs = static_cast<double>(queries.size() * repeats);
    report.unlabeled_mean_ms = report.unlabeled_seconds * 1000.0 / runs;

    if (with_labeling) {
        auto t2 = clock::now();
        for (std::size_t r = 0; r < repeats; ++r) {
            for (const Triple& q : queries) {
                Subgraph sg = extract(graph, q.head, q.rel, q.tail, vocab, cfg);
                auto labels = double_radius_label(sg, sg.query_src(), sg.query_dst());
                sink = sink + labels.size() + sg.edges.size();
            }
        }
        auto t3 = clock::now();
        report.labeled_seconds = std::chrono::duration<double>(t3 - t2).count();
        report.labeled_mean_ms = report.labeled_seconds * 1000.0 / runs;
        report.speedup =
            report.unlabeled_seconds > 0.0 ? report.labeled_seconds / report.unlabeled_seconds : 0.0;
    }
    (void)sink;
    return report;
}

}  // namespace rest
