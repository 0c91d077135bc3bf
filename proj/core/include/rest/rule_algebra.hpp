#pragma once

#include <optional>
#include <set>
#include <span>
#include <vector>

#include "rest/semiring.hpp"
#include "rest/subgraph.hpp"

namespace rest {

// Directed closed walk through the query edge: starts at u with the query
// edge (u -> v), returns to u. Node and edge repetition is permitted, so a
// walk may traverse the query edge itself again.
struct ClosedWalk {
    std::vector<std::uint32_t> edges;  // subgraph edge indices, edges[0] == query edge
    std::size_t length() const noexcept { return edges.size(); }
};

inline constexpr std::size_t kDefaultWalkCap = 1'000'000;

// All closed walks of total length <= max_len (query edge included in the
// count). The bare length-1 query edge is not a walk; the seed term covers
// it. Exceeding the cap on explored extensions raises RuntimeError.
std::vector<ClosedWalk> enumerate_closed_walks(const Subgraph& sg, std::size_t max_len,
                                               std::size_t cap = kDefaultWalkCap);

enum class SeedMode { single_source, full };

// k iterations of edge-wise message passing over an arbitrary semiring:
//   m[e]    = (h[src] (*) r) (+) (state[e] (*) r)
//   h'[z]   = (+) over incoming m   (empty sum = zero, recomputed each layer)
//   state[e]= h'[src] (+) state[e]
// Under single_source seeding only the query edge starts at its relation
// value; under full every edge does. Returns the final query-edge state.
template <Semiring S>
typename S::Value semiring_forward(const Subgraph& sg, std::size_t layers, const S& s,
                                   std::span<const typename S::Value> rel_values,
                                   SeedMode mode = SeedMode::single_source) {
    if (layers < 1) throw ConfigError("semiring_forward: layers must be >= 1");
    for (const SubEdge& e : sg.edges)
        if (e.rel >= rel_values.size())
            throw ConfigError("semiring_forward: no carrier value for relation " +
                              std::to_string(e.rel));

    using Value = typename S::Value;
    const std::size_t n = sg.node_count(), m = sg.edges.size();

    std::vector<Value> state(m, s.zero());
    if (mode == SeedMode::single_source) {
        state[sg.query_edge] = rel_values[sg.query_rel()];
    } else {
        for (std::size_t i = 0; i < m; ++i) state[i] = rel_values[sg.edges[i].rel];
    }

    std::vector<Value> h(n, s.zero());
    std::vector<Value> msg(m, s.zero());
    for (std::size_t layer = 0; layer < layers; ++layer) {
        for (std::size_t i = 0; i < m; ++i) {
            const Value& r = rel_values[sg.edges[i].rel];
            msg[i] = s.plus(s.times(h[sg.edges[i].src], r), s.times(state[i], r));
        }
        std::vector<Value> h_next(n, s.zero());
        for (std::size_t i = 0; i < m; ++i)
            h_next[sg.edges[i].dst] = s.plus(h_next[sg.edges[i].dst], msg[i]);
        for (std::size_t i = 0; i < m; ++i)
            state[i] = s.plus(h_next[sg.edges[i].src], state[i]);
        h = std::move(h_next);
    }
    return state[sg.query_edge];
}

// Exponent vectors of the rule-induced representation: the seed monomial
// r_t plus, per closed walk, r_t times the walk's relation product (so the
// target relation counts once for the seed and once per traversal).
std::set<Monomial> rule_induced_support(const Subgraph& sg, std::size_t layers,
                                        std::size_t cap = kDefaultWalkCap);

struct SupportReport {
    std::set<Monomial> gnn_support;
    std::set<Monomial> oracle_support;
    bool match = false;
    bool positive_coefficients = false;
    std::optional<Monomial> witness;  // first monomial in the symmetric difference

    bool passed() const noexcept { return match && positive_coefficients; }
};

// Runs the polynomial-semiring forward and compares its support against the
// closed-walk oracle; on a support match also checks that every coefficient
// is a strictly positive integer.
SupportReport verify_theorem1(const Subgraph& sg, std::size_t layers,
                              SeedMode mode = SeedMode::single_source,
                              std::size_t cap = kDefaultWalkCap);

// Polynomial produced by the forward pass alone (both seed modes); the
// ingredient tests and the full-initialization comparison build on this.
Polynomial forward_polynomial(const Subgraph& sg, std::size_t layers,
                              SeedMode mode = SeedMode::single_source);

struct TropicalReport {
    std::optional<long long> forward;
    std::optional<long long> oracle;
    bool match = false;
};

// Tropical (max, +, -inf) instantiation against the brute-force best-walk
// value max{seed} u {seed + walk sums}. Rejects the carrier if the semiring
// identities fail on the sampled values.
TropicalReport verify_theorem2(const Subgraph& sg, std::size_t layers,
                               std::span<const long long> rel_values,
                               std::size_t cap = kDefaultWalkCap);

// True when some directed cycle of length <= max_len avoids the query edge.
bool has_cycle_avoiding_query(const Subgraph& sg, std::size_t max_len);

}  // namespace rest
