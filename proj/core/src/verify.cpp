#include "rest/verify.hpp"

#include <algorithm>
#include <random>

namespace rest {

namespace {

std::size_t uniform_size(std::mt19937_64& rng, std::size_t lo, std::size_t hi) {
    return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

}  // namespace

VerifyInstance make_random_instance(std::uint64_t seed, const InstanceConfig& cfg) {
    std::mt19937_64 rng(seed);
    const std::size_t nodes = uniform_size(rng, 2, std::max<std::size_t>(2, cfg.max_nodes));
    const std::size_t rels = uniform_size(rng, 1, std::max<std::size_t>(1, cfg.max_relations));
    const std::size_t extra_edges = uniform_size(rng, 1, cfg.max_edges - 1);

    std::uniform_int_distribution<std::uint32_t> node_dist(0, static_cast<std::uint32_t>(nodes - 1));
    std::uniform_int_distribution<RelationId> rel_dist(0, static_cast<RelationId>(rels - 1));

    std::uint32_t u = node_dist(rng), v = node_dist(rng);
    while (v == u) v = node_dist(rng);
    RelationId r_t = rel_dist(rng);

    VerifyInstance inst;
    inst.seed = seed;
    inst.layers = uniform_size(rng, cfg.min_layers, cfg.max_layers);
    inst.sg.hops = static_cast<std::uint32_t>(inst.layers);
    inst.sg.global_ids.resize(nodes);
    for (std::size_t i = 0; i < nodes; ++i) inst.sg.global_ids[i] = static_cast<EntityId>(i);
    inst.sg.edges.push_back({u, r_t, v, kQueryEdgeOrigin});
    inst.sg.query_edge = 0;

    for (std::size_t i = 0; i < extra_edges; ++i) {
        std::uint32_t s = node_dist(rng), d = node_dist(rng);
        RelationId r = rel_dist(rng);
        if (s == u && r == r_t && d == v) continue;  // only the query edge may carry the query triple
        inst.sg.edges.push_back({s, r, d, static_cast<std::int64_t>(i)});
    }
    return inst;
}

VerifyInstance make_extracted_instance(std::uint64_t seed, const InstanceConfig& cfg) {
    std::mt19937_64 rng(seed);
    const std::size_t nodes = uniform_size(rng, 3, std::max<std::size_t>(3, cfg.max_nodes));
    const std::size_t base_rel_count =
        uniform_size(rng, 1, std::max<std::size_t>(1, cfg.max_relations / 2));
    // The whole base triple budget (query + chain + incident edge + random)
    // must fit in max_edges/2 so the augmented subgraph stays within bounds.
    const std::size_t max_base = cfg.max_edges / 2;
    const std::size_t fixed = 2 + (nodes - 1);
    const std::size_t base_edges = fixed < max_base ? uniform_size(rng, 0, max_base - fixed) : 0;

    RelationVocab vocab;
    for (std::size_t r = 0; r < base_rel_count; ++r) vocab.intern("r" + std::to_string(r));

    std::uniform_int_distribution<EntityId> node_dist(0, static_cast<EntityId>(nodes - 1));
    std::uniform_int_distribution<RelationId> rel_dist(0,
                                                       static_cast<RelationId>(base_rel_count - 1));

    EntityId u = node_dist(rng), v = node_dist(rng);
    while (v == u) v = node_dist(rng);
    RelationId r_t = rel_dist(rng);

    std::vector<Triple> triples;
    triples.push_back({u, r_t, v});  // the positive example lives in the graph
    // Spanning chain keeps the graph connected so neighborhoods overlap.
    for (std::size_t i = 0; i + 1 < nodes; ++i)
        triples.push_back({static_cast<EntityId>(i), rel_dist(rng), static_cast<EntityId>(i + 1)});
    for (std::size_t i = 0; i < base_edges; ++i) {
        Triple t{node_dist(rng), rel_dist(rng), node_dist(rng)};
        if (t.head == u && t.rel == r_t && t.tail == v) continue;  // keep the positive unique
        triples.push_back(t);
    }

    // Keep one incident edge at u that query-copy removal cannot touch.
    EntityId w = node_dist(rng);
    while (w == u || w == v) w = node_dist(rng);
    triples.push_back({u, rel_dist(rng), w});

    KnowledgeGraph graph = build_graph(triples, nodes, vocab, /*add_inverses=*/true);

    VerifyInstance inst;
    inst.seed = seed;
    inst.layers = uniform_size(rng, cfg.min_layers, cfg.max_layers);

    ExtractionConfig ecfg;
    ecfg.hops = static_cast<std::uint32_t>(inst.layers);
    ecfg.scope = (rng() & 1) ? Scope::enclosing : Scope::unclosing;
    inst.sg = extract(graph, u, r_t, v, vocab, ecfg);
    return inst;
}

InstanceReport verify_instance(VerifyInstance instance) {
    InstanceReport report;
    report.theorem1 = verify_theorem1(instance.sg, instance.layers);

    RelationId max_rel = 0;
    for (const SubEdge& e : instance.sg.edges) max_rel = std::max(max_rel, e.rel);
    std::mt19937_64 rng(instance.seed ^ 0x9e3779b97f4a7c15ull);
    std::vector<long long> values(max_rel + 1);
    std::uniform_int_distribution<long long> val_dist(-4, 9);
    for (auto& x : values) x = val_dist(rng);
    report.theorem2 =
        verify_theorem2(instance.sg, instance.layers, std::span<const long long>(values));

    report.instance = std::move(instance);
    return report;
}

}  // namespace rest
