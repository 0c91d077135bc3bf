#pragma once

#include <filesystem>

#include "rest/kg.hpp"

namespace rest {

// Composition benchmark: r3(x, z) holds exactly when some y gives
// r1(x, y) and r2(y, z). Train and test halves use disjoint entity
// namespaces with the same generative law, so the split is inductive.
struct CompositionConfig {
    std::size_t train_entities = 60;
    std::size_t test_entities = 30;
    std::size_t out_degree = 2;       // r1 and r2 edges per entity
    std::size_t cluster_size = 0;     // >0 confines edges to entity clusters of this size
    double valid_fraction = 0.1;      // train r3 facts held out for model selection
    double test_fraction = 0.4;       // test-graph r3 facts held out as test triples
    std::uint64_t seed = 0;
};

DatasetBundle make_composition_dataset(const CompositionConfig& cfg, bool add_inverses = true);

// Relation ids of the generative law inside the bundle's vocabulary.
struct CompositionRelations {
    RelationId r1 = 0, r2 = 1, r3 = 2;
};

// Writes train.txt / valid.txt / train_ind.txt / test_ind.txt so the bundle
// round-trips through load_dataset.
void write_dataset_dir(const std::filesystem::path& dir, const DatasetBundle& bundle);

// Uniform random multigraph for the extraction benchmark; densities are
// chosen by the caller (entities / base_triples / relations).
KnowledgeGraph make_uniform_graph(std::size_t entities, std::size_t base_triples,
                                  std::size_t relations, std::uint64_t seed,
                                  RelationVocab& vocab, bool add_inverses = true);

}  // namespace rest
