#include "rest/rule_scorer.hpp"

#include <algorithm>

#include "rest/parallel.hpp"

namespace rest {

Subgraph build_rule_subgraph(RelationId head_rel, std::span<const RelationId> body,
                             std::size_t base_count) {
    if (body.empty()) throw ConfigError("rule body must not be empty");
    if (body.size() > kMaxRuleBodyLen)
        throw ConfigError("rule body length " + std::to_string(body.size()) +
                          " exceeds the cycle bound of " + std::to_string(kMaxRuleBodyLen));
    if (head_rel >= base_count) throw ConfigError("rule head must be a base relation id");
    for (RelationId r : body)
        if (r >= 2 * base_count)
            throw ConfigError("body relation id " + std::to_string(r) + " outside the vocabulary");

    // nodes: 0 = u, 1 = v, then one fresh node per inner chain position
    Subgraph sg;
    sg.hops = static_cast<std::uint32_t>(body.size() + 1);
    sg.global_ids.resize(body.size() + 1);
    for (std::size_t i = 0; i < sg.global_ids.size(); ++i)
        sg.global_ids[i] = static_cast<EntityId>(i);
    sg.edges.push_back({0, head_rel, 1, kQueryEdgeOrigin});
    sg.query_edge = 0;

    std::uint32_t current = 1;  // v
    for (std::size_t i = 0; i < body.size(); ++i) {
        std::uint32_t next =
            (i + 1 == body.size()) ? 0u : static_cast<std::uint32_t>(2 + i);  // back to u at the end
        sg.edges.push_back({current, body[i], next, static_cast<std::int64_t>(i)});
        current = next;
    }
    return sg;
}

std::vector<RuleCandidate> score_rules(const ModelParams& params, const RelationVocab& relations,
                                       RelationId head_rel, std::size_t max_body_len,
                                       std::size_t top_k, std::size_t workers) {
    if (max_body_len < 1 || max_body_len > kMaxRuleBodyLen)
        throw ConfigError("max_body_len must lie in [1, " + std::to_string(kMaxRuleBodyLen) + "]");
    const std::size_t rels = relations.augmented_count();
    if (rels == 0) throw ConfigError("empty relation vocabulary");
    if (head_rel >= relations.base_count())
        throw ConfigError("rule head " + std::to_string(head_rel) + " outside the vocabulary");
    if (2 * relations.base_count() != params.augmented_relations())
        throw ConfigError("vocabulary does not match the model embedding table");

    // all bodies of length 1..max_body_len via odometer enumeration
    std::vector<std::vector<RelationId>> bodies;
    for (std::size_t len = 1; len <= max_body_len; ++len) {
        std::vector<RelationId> body(len, 0);
        while (true) {
            bodies.push_back(body);
            std::size_t pos = len;
            while (pos > 0) {
                if (++body[pos - 1] < rels) break;
                body[pos - 1] = 0;
                --pos;
            }
            if (pos == 0) break;
        }
    }

    std::vector<RuleCandidate> candidates(bodies.size());
    parallel_for(bodies.size(), workers, [&](std::size_t i) {
        Subgraph sg = build_rule_subgraph(head_rel, bodies[i], relations.base_count());
        candidates[i] = {head_rel, bodies[i], rest_score(sg, params)};
    });

    std::sort(candidates.begin(), candidates.end(),
              [](const RuleCandidate& a, const RuleCandidate& b) {
                  if (a.score != b.score) return a.score > b.score;
                  return a.body < b.body;
              });
    if (candidates.size() > top_k) candidates.resize(top_k);
    return candidates;
}

std::string body_str(const std::vector<RelationId>& body, const RelationVocab& relations) {
    std::string out;
    for (std::size_t i = 0; i < body.size(); ++i) {
        if (i) out += " -> ";
        out += relations.name(body[i]);
    }
    return out;
}

}  // namespace rest
