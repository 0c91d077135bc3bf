#pragma once

#include <span>

#include "rest/checkpoint.hpp"
#include "rest/subgraph.hpp"

namespace rest {

struct RuleCandidate {
    RelationId head_rel = 0;
    std::vector<RelationId> body;  // chain relations read along v -> ... -> u
    double score = 0.0;
};

inline constexpr std::size_t kMaxRuleBodyLen = 3;  // cycle length <= 4 with the head edge

// Synthetic cycle on fresh nodes: query edge (u, head_rel, v) plus the chain
// v -(body[0])-> n1 -(body[1])-> ... -> u. Body relations may be inverse ids.
Subgraph build_rule_subgraph(RelationId head_rel, std::span<const RelationId> body,
                             std::size_t base_count);

// Scores every body over the augmented relation vocabulary up to max_body_len
// and returns the top_k, ties broken by lexicographic body order.
std::vector<RuleCandidate> score_rules(const ModelParams& params, const RelationVocab& relations,
                                       RelationId head_rel,
                                       std::size_t max_body_len = kMaxRuleBodyLen,
                                       std::size_t top_k = 3, std::size_t workers = 1);

std::string body_str(const std::vector<RelationId>& body, const RelationVocab& relations);

}  // namespace rest
