#include "rest/rule_algebra.hpp"

#include <algorithm>
#include <map>

namespace rest {

namespace {

std::vector<std::vector<std::uint32_t>> local_out_adj(const Subgraph& sg) {
    std::vector<std::vector<std::uint32_t>> adj(sg.node_count());
    for (std::uint32_t i = 0; i < sg.edges.size(); ++i) adj[sg.edges[i].src].push_back(i);
    return adj;
}

}  // namespace

std::vector<ClosedWalk> enumerate_closed_walks(const Subgraph& sg, std::size_t max_len,
                                               std::size_t cap) {
    if (max_len < 1) throw ConfigError("enumerate_closed_walks: max_len must be >= 1");
    auto adj = local_out_adj(sg);
    const std::uint32_t u = sg.query_src(), v = sg.query_dst();

    std::vector<ClosedWalk> walks;
    std::vector<std::uint32_t> path{sg.query_edge};
    std::size_t explored = 0;

    auto dfs = [&](auto&& self, std::uint32_t node, std::size_t len) -> void {
        if (node == u && len >= 2) walks.push_back({path});
        if (len == max_len) return;
        for (std::uint32_t e : adj[node]) {
            if (++explored > cap)
                throw RuntimeError("closed-walk enumeration exceeded cap of " +
                                   std::to_string(cap));
            path.push_back(e);
            self(self, sg.edges[e].dst, len + 1);
            path.pop_back();
        }
    };
    dfs(dfs, v, 1);
    return walks;
}

std::set<Monomial> rule_induced_support(const Subgraph& sg, std::size_t layers, std::size_t cap) {
    const RelationId r_t = sg.query_rel();
    std::set<Monomial> support;
    support.insert(Monomial{{r_t, 1}});

    for (const ClosedWalk& w : enumerate_closed_walks(sg, layers, cap)) {
        std::map<RelationId, std::uint32_t> exps;
        exps[r_t] += 1;  // initialization seed
        for (std::uint32_t e : w.edges) exps[sg.edges[e].rel] += 1;
        support.insert(Monomial(exps.begin(), exps.end()));
    }
    return support;
}

Polynomial forward_polynomial(const Subgraph& sg, std::size_t layers, SeedMode mode) {
    RelationId max_rel = 0;
    for (const SubEdge& e : sg.edges) max_rel = std::max(max_rel, e.rel);
    std::vector<Polynomial> values;
    values.reserve(max_rel + 1);
    for (RelationId r = 0; r <= max_rel; ++r) values.push_back(Polynomial::variable(r));
    return semiring_forward(sg, layers, PolynomialSemiring{},
                            std::span<const Polynomial>(values), mode);
}

SupportReport verify_theorem1(const Subgraph& sg, std::size_t layers, SeedMode mode,
                              std::size_t cap) {
    SupportReport report;
    Polynomial value = forward_polynomial(sg, layers, mode);
    report.gnn_support = value.support();
    report.oracle_support = rule_induced_support(sg, layers, cap);
    report.match = report.gnn_support == report.oracle_support;
    if (!report.match) {
        std::vector<Monomial> diff;
        std::set_symmetric_difference(report.gnn_support.begin(), report.gnn_support.end(),
                                      report.oracle_support.begin(), report.oracle_support.end(),
                                      std::back_inserter(diff));
        report.witness = diff.front();
    }
    report.positive_coefficients = value.all_coefficients_positive();
    return report;
}

TropicalReport verify_theorem2(const Subgraph& sg, std::size_t layers,
                               std::span<const long long> rel_values, std::size_t cap) {
    TropicalSemiring trop;
    std::vector<TropicalSemiring::Value> values(rel_values.begin(), rel_values.end());
    values.push_back(trop.zero());
    if (!check_semiring_identities(trop, std::span<const TropicalSemiring::Value>(values)))
        throw ConfigError("semiring rejected: identities fail on sampled carrier elements");
    values.pop_back();

    TropicalReport report;
    report.forward =
        semiring_forward(sg, layers, trop, std::span<const TropicalSemiring::Value>(values));

    const RelationId r_t = sg.query_rel();
    if (r_t >= rel_values.size())
        throw ConfigError("verify_theorem2: no value for query relation");
    long long best = rel_values[r_t];
    for (const ClosedWalk& w : enumerate_closed_walks(sg, layers, cap)) {
        long long sum = rel_values[r_t];  // seed
        for (std::uint32_t e : w.edges) sum += rel_values[sg.edges[e].rel];
        best = std::max(best, sum);
    }
    report.oracle = best;
    report.match = trop.equal(report.forward, report.oracle);
    return report;
}

bool has_cycle_avoiding_query(const Subgraph& sg, std::size_t max_len) {
    auto adj = local_out_adj(sg);
    const std::size_t n = sg.node_count();

    // DFS from every node over non-query edges, looking for a return to the
    // start within max_len steps. Small instances only.
    for (std::uint32_t start = 0; start < n; ++start) {
        bool found = false;
        auto dfs = [&](auto&& self, std::uint32_t node, std::size_t len) -> void {
            if (found || len == max_len) return;
            for (std::uint32_t e : adj[node]) {
                if (e == sg.query_edge) continue;
                std::uint32_t dst = sg.edges[e].dst;
                if (dst == start) {
                    found = true;
                    return;
                }
                self(self, dst, len + 1);
            }
        };
        dfs(dfs, start, 0);
        if (found) return true;
    }
    return false;
}

}  // namespace rest
