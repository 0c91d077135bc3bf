#pragma once

#include <functional>

#include "rest/checkpoint.hpp"
#include "rest/kg.hpp"
#include "rest/subgraph.hpp"

namespace rest {

enum class Sides { tail, head, both };

struct RankingConfig {
    std::size_t num_negatives = 50;
    bool filtered = true;
    std::uint64_t seed = 0;
    Sides sides = Sides::both;
    std::size_t workers = 1;
};

struct Metrics {
    double hits1 = 0.0;
    double hits5 = 0.0;
    double hits10 = 0.0;
    double mrr = 0.0;
    std::size_t count = 0;  // rankings accumulated
};

using TripleScorer = std::function<double(const Triple&)>;

// Expected rank under the tie rule: 1 + |better| + ceil(|tied| / 2).
// With filtering on, a negative present in the graph is a protocol error.
std::size_t rank_triple(const TripleScorer& scorer, const KnowledgeGraph& graph,
                        const Triple& positive, const std::vector<Triple>& negatives,
                        bool filtered);

// Ranks every test triple against num_negatives corruptions per configured
// side. Corruptions are uniform over the graph's entity space, never equal to
// a known true triple (graph edges or test triples) and never degenerate
// (head == tail). Negative sets are deterministic in (seed, triple index, side).
Metrics evaluate(const TripleScorer& scorer, const KnowledgeGraph& graph,
                 const std::vector<Triple>& test_triples, const RankingConfig& cfg);

// Scorer that extracts the subgraph dictated by the model config and runs the
// forward pass in eval mode.
TripleScorer make_rest_scorer(const ModelParams& params, const KnowledgeGraph& graph,
                              const RelationVocab& relations);

Metrics evaluate_checkpoint(const Checkpoint& ckpt, const KnowledgeGraph& graph,
                            const std::vector<Triple>& test_triples, const RankingConfig& cfg);

}  // namespace rest
