#pragma once

#include <cstdint>

#include "rest/rule_algebra.hpp"

namespace rest {

struct InstanceConfig {
    std::size_t max_nodes = 8;
    std::size_t max_edges = 20;      // subgraph edges, query edge included
    std::size_t max_relations = 4;   // distinct relation ids
    std::size_t min_layers = 2;
    std::size_t max_layers = 4;
};

struct VerifyInstance {
    Subgraph sg;
    std::uint64_t seed = 0;
    std::size_t layers = 0;
};

// Random directed multigraph with a marked query edge, built directly (the
// theorems quantify over any subgraph with a distinguished query edge).
VerifyInstance make_random_instance(std::uint64_t seed, const InstanceConfig& cfg = {});

// Instance produced by the real pipeline: a random connected KG with inverse
// augmentation, the query triple inserted as a positive, then extraction.
// u always keeps a non-query incident edge so query-copy removal never
// isolates it.
VerifyInstance make_extracted_instance(std::uint64_t seed, const InstanceConfig& cfg = {});

struct InstanceReport {
    VerifyInstance instance;
    SupportReport theorem1;
    TropicalReport theorem2;

    bool passed() const { return theorem1.passed() && theorem2.match; }
};

// Runs the Theorem-1 polynomial check and the Theorem-2 tropical check on
// one instance, with tropical relation values derived from the instance seed.
InstanceReport verify_instance(VerifyInstance instance);

}  // namespace rest
