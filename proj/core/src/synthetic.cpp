#include "rest/synthetic.hpp"

#include <algorithm>
#include <random>
#include <set>

namespace rest {

namespace {

struct Half {
    std::vector<Triple> graph_triples;  // r1, r2 and the r3 facts kept in the graph
    std::vector<Triple> held_out;       // r3 facts held out
};

Half make_half(std::size_t entities, std::size_t out_degree, std::size_t cluster_size,
               double held_fraction, std::mt19937_64& rng) {
    // with clustering, edges stay inside consecutive entity blocks, which
    // keeps enclosing subgraphs small
    auto sample_peer = [&](EntityId x) {
        if (cluster_size == 0) {
            std::uniform_int_distribution<EntityId> ent(0, static_cast<EntityId>(entities - 1));
            EntityId y = ent(rng);
            while (y == x) y = ent(rng);
            return y;
        }
        EntityId lo = static_cast<EntityId>((x / cluster_size) * cluster_size);
        EntityId hi = static_cast<EntityId>(
            std::min<std::size_t>(lo + cluster_size, entities) - 1);
        std::uniform_int_distribution<EntityId> ent(lo, hi);
        EntityId y = ent(rng);
        while (y == x) y = ent(rng);
        return y;
    };

    std::set<std::pair<EntityId, EntityId>> r1, r2;
    for (EntityId x = 0; x < entities; ++x) {
        for (std::size_t d = 0; d < out_degree; ++d) {
            r1.insert({x, sample_peer(x)});
            r2.insert({x, sample_peer(x)});
        }
    }

    // the law: r3 = r1 composed with r2
    std::set<std::pair<EntityId, EntityId>> r3;
    for (const auto& [x, y] : r1)
        for (const auto& [y2, z] : r2)
            if (y == y2 && x != z) r3.insert({x, z});

    std::vector<std::pair<EntityId, EntityId>> r3_list(r3.begin(), r3.end());
    std::shuffle(r3_list.begin(), r3_list.end(), rng);
    std::size_t held = static_cast<std::size_t>(held_fraction * r3_list.size());

    Half half;
    for (const auto& [x, y] : r1) half.graph_triples.push_back({x, 0, y});
    for (const auto& [y, z] : r2) half.graph_triples.push_back({y, 1, z});
    for (std::size_t i = 0; i < r3_list.size(); ++i) {
        Triple t{r3_list[i].first, 2, r3_list[i].second};
        (i < held ? half.held_out : half.graph_triples).push_back(t);
    }
    return half;
}

}  // namespace

DatasetBundle make_composition_dataset(const CompositionConfig& cfg, bool add_inverses) {
    if (cfg.train_entities < 3 || cfg.test_entities < 3)
        throw ConfigError("composition dataset needs at least three entities per half");

    std::mt19937_64 rng(cfg.seed);

    DatasetBundle bundle;
    bundle.mode = DatasetMode::inductive;
    bundle.relations.intern("r1");
    bundle.relations.intern("r2");
    bundle.relations.intern("r3");

    for (std::size_t i = 0; i < cfg.train_entities; ++i)
        bundle.train_entities.intern("t" + std::to_string(i));
    for (std::size_t i = 0; i < cfg.test_entities; ++i)
        bundle.test_entities.intern("i" + std::to_string(i));

    if (cfg.cluster_size == 1) throw ConfigError("cluster_size 1 leaves no valid edges");
    Half train_half = make_half(cfg.train_entities, cfg.out_degree, cfg.cluster_size,
                                cfg.valid_fraction, rng);
    Half test_half = make_half(cfg.test_entities, cfg.out_degree, cfg.cluster_size,
                               cfg.test_fraction, rng);

    bundle.train_graph = build_graph(train_half.graph_triples, cfg.train_entities,
                                     bundle.relations, add_inverses);
    bundle.valid_triples = std::move(train_half.held_out);
    bundle.test_graph =
        build_graph(test_half.graph_triples, cfg.test_entities, bundle.relations, add_inverses);
    bundle.test_triples = std::move(test_half.held_out);
    return bundle;
}

void write_dataset_dir(const std::filesystem::path& dir, const DatasetBundle& bundle) {
    std::filesystem::create_directories(dir);
    write_triples(dir / "train.txt", base_triples(bundle.train_graph, bundle.relations),
                  bundle.train_entities, bundle.relations);
    write_triples(dir / "valid.txt", bundle.valid_triples, bundle.train_entities,
                  bundle.relations);
    write_triples(dir / "train_ind.txt", base_triples(bundle.test_graph, bundle.relations),
                  bundle.test_entities, bundle.relations);
    write_triples(dir / "test_ind.txt", bundle.test_triples, bundle.test_entities,
                  bundle.relations);
}

KnowledgeGraph make_uniform_graph(std::size_t entities, std::size_t base_triples,
                                  std::size_t relations, std::uint64_t seed, RelationVocab& vocab,
                                  bool add_inverses) {
    if (entities < 2 || relations < 1) throw ConfigError("graph too small");
    for (std::size_t r = 0; r < relations; ++r) vocab.intern("b" + std::to_string(r));

    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<EntityId> ent(0, static_cast<EntityId>(entities - 1));
    std::uniform_int_distribution<RelationId> rel(0, static_cast<RelationId>(relations - 1));

    std::vector<Triple> triples;
    triples.reserve(base_triples);
    while (triples.size() < base_triples) {
        EntityId h = ent(rng), t = ent(rng);
        if (h == t) continue;
        triples.push_back({h, rel(rng), t});
    }
    return build_graph(triples, entities, vocab, add_inverses);
}

}  // namespace rest
