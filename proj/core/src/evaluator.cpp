#include "rest/evaluator.hpp"

#include <algorithm>
#include <random>
#include <unordered_set>

#include "rest/parallel.hpp"

namespace rest {

namespace {

std::uint64_t key_of(const Triple& t) {
    return (static_cast<std::uint64_t>(t.head) << 40) | (static_cast<std::uint64_t>(t.rel) << 24) |
           static_cast<std::uint64_t>(t.tail);
}

constexpr std::size_t kMaxTriesPerNegative = 2000;

// One corrupted triple, or throws when the space is too dense to corrupt.
Triple corrupt(const Triple& positive, bool corrupt_head, std::size_t entity_count,
               const KnowledgeGraph& graph, const std::unordered_set<std::uint64_t>& extra_true,
               std::mt19937_64& rng) {
    std::uniform_int_distribution<EntityId> ent(0, static_cast<EntityId>(entity_count - 1));
    for (std::size_t attempt = 0; attempt < kMaxTriesPerNegative; ++attempt) {
        Triple cand = positive;
        (corrupt_head ? cand.head : cand.tail) = ent(rng);
        if (cand == positive || cand.head == cand.tail) continue;
        if (graph.has_triple(cand) || extra_true.contains(key_of(cand))) continue;
        return cand;
    }
    throw DataError("could not sample a filtered corruption; graph too dense");
}

}  // namespace

std::size_t rank_triple(const TripleScorer& scorer, const KnowledgeGraph& graph,
                        const Triple& positive, const std::vector<Triple>& negatives,
                        bool filtered) {
    if (filtered) {
        for (const Triple& n : negatives)
            if (graph.has_triple(n))
                throw DataError("filtered ranking saw a negative that is a true triple");
    }
    const double pos_score = scorer(positive);
    std::size_t better = 0, tied = 0;
    for (const Triple& n : negatives) {
        double s = scorer(n);
        if (s > pos_score) ++better;
        else if (s == pos_score) ++tied;
    }
    return 1 + better + (tied + 1) / 2;
}

Metrics evaluate(const TripleScorer& scorer, const KnowledgeGraph& graph,
                 const std::vector<Triple>& test_triples, const RankingConfig& cfg) {
    if (cfg.num_negatives < 1) throw ConfigError("num_negatives must be >= 1");
    if (graph.entity_count() < 2) throw DataError("graph too small to corrupt triples");

    std::unordered_set<std::uint64_t> extra_true;
    for (const Triple& t : test_triples) extra_true.insert(key_of(t));

    std::vector<bool> corrupt_heads;
    if (cfg.sides == Sides::tail) corrupt_heads = {false};
    else if (cfg.sides == Sides::head) corrupt_heads = {true};
    else corrupt_heads = {false, true};

    struct Slot {
        std::size_t rank = 0;
    };
    const std::size_t total = test_triples.size() * corrupt_heads.size();
    std::vector<Slot> slots(total);

    parallel_for(total, cfg.workers, [&](std::size_t job) {
        const std::size_t ti = job / corrupt_heads.size();
        const bool head_side = corrupt_heads[job % corrupt_heads.size()];
        const Triple& pos = test_triples[ti];

        std::mt19937_64 rng(cfg.seed ^ (0x51ed2701u + ti * 2654435761ull + (head_side ? 1 : 0)));
        std::vector<Triple> negatives;
        negatives.reserve(cfg.num_negatives);
        for (std::size_t n = 0; n < cfg.num_negatives; ++n)
            negatives.push_back(
                corrupt(pos, head_side, graph.entity_count(), graph, extra_true, rng));
        slots[job].rank = rank_triple(scorer, graph, pos, negatives, cfg.filtered);
    });

    Metrics m;
    m.count = total;
    for (const Slot& s : slots) {
        if (s.rank <= 1) m.hits1 += 1;
        if (s.rank <= 5) m.hits5 += 1;
        if (s.rank <= 10) m.hits10 += 1;
        m.mrr += 1.0 / static_cast<double>(s.rank);
    }
    if (total > 0) {
        m.hits1 /= total;
        m.hits5 /= total;
        m.hits10 /= total;
        m.mrr /= total;
    }
    return m;
}

TripleScorer make_rest_scorer(const ModelParams& params, const KnowledgeGraph& graph,
                              const RelationVocab& relations) {
    ExtractionConfig ecfg{.hops = params.config.hops, .scope = params.config.scope,
                          .max_nodes = std::nullopt};
    return [&params, &graph, &relations, ecfg](const Triple& t) {
        Subgraph sg = extract(graph, t.head, t.rel, t.tail, relations, ecfg);
        return rest_score(sg, params);
    };
}

Metrics evaluate_checkpoint(const Checkpoint& ckpt, const KnowledgeGraph& graph,
                            const std::vector<Triple>& test_triples, const RankingConfig& cfg) {
    return evaluate(make_rest_scorer(ckpt.params, graph, ckpt.relations), graph, test_triples,
                    cfg);
}

}  // namespace rest
