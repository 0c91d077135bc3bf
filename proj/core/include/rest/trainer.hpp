#pragma once

#include <filesystem>
#include <random>

#include "rest/checkpoint.hpp"
#include "rest/evaluator.hpp"
#include "rest/kg.hpp"

namespace rest {

struct TrainConfig {
    double learning_rate = 5e-4;
    std::size_t max_epochs = 10;
    std::size_t batch_size = 16;
    std::size_t negatives_per_positive = 1;
    std::uint64_t seed = 0;
    std::size_t valid_every = 1;          // epochs between validation passes
    std::size_t valid_negatives = 50;
    std::size_t workers = 1;
    bool cache_subgraphs = false;         // reuse extracted subgraphs across epochs
    std::filesystem::path log_path;       // optional; one JSON object per epoch

    void validate() const;
};

struct AdamConfig {
    double lr = 5e-4;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
};

struct AdamState {
    std::vector<Tensor> m;  // for_each_tensor order
    std::vector<Tensor> v;
    std::uint64_t t = 0;
};

// One bias-corrected Adam update over every parameter tensor. Gradients must
// be aligned with for_each_tensor order; moments are allocated on first use.
void adam_step(ModelParams& params, const std::vector<Tensor>& grads, AdamState& state,
               const AdamConfig& cfg);

struct SamplingError : DataError {
    explicit SamplingError(const std::string& m) : DataError(m) {}
};

// Corrupts head or tail (fair coin) with a uniform entity such that the
// result is not a graph triple, not the positive, and not degenerate
// (head == tail, which extraction cannot score). Bounded tries.
std::vector<Triple> sample_negatives(const KnowledgeGraph& graph, const Triple& positive,
                                     std::size_t n, std::mt19937_64& rng);

struct EpochLog {
    std::size_t epoch = 0;
    double train_loss = 0.0;
    double valid_hits10 = 0.0;
    double seconds = 0.0;
};

struct TrainResult {
    Checkpoint best;          // highest validation Hits@10
    Checkpoint final;         // parameters after the last epoch
    std::vector<EpochLog> log;
    double best_hits10 = 0.0;
};

// Per epoch: seeded shuffle of the base train triples; per positive, extract
// subgraphs for it and its sampled negatives (query copies removed by
// extraction), forward, mean BCE over the batch, backward, one Adam step per
// batch. The per-triple random streams are partitioned by (seed, epoch,
// position), so worker count never changes the result.
TrainResult train(const DatasetBundle& bundle, const ModelConfig& mcfg, const TrainConfig& tcfg);

}  // namespace rest
