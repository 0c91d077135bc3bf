#include "rest/trainer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "rest/parallel.hpp"

namespace rest {

void TrainConfig::validate() const {
    if (learning_rate < 0.0) throw ConfigError("learning_rate must be >= 0");
    if (max_epochs < 1) throw ConfigError("max_epochs must be >= 1");
    if (batch_size < 1) throw ConfigError("batch_size must be >= 1");
    if (negatives_per_positive < 1) throw ConfigError("negatives_per_positive must be >= 1");
    if (valid_every < 1) throw ConfigError("valid_every must be >= 1");
}

void adam_step(ModelParams& params, const std::vector<Tensor>& grads, AdamState& state,
               const AdamConfig& cfg) {
    std::vector<Tensor*> tensors;
    params.for_each_tensor([&](const std::string&, Tensor& t) { tensors.push_back(&t); });
    if (grads.size() != tensors.size())
        throw RuntimeError("adam_step: gradient count " + std::to_string(grads.size()) +
                           " does not match parameter count " + std::to_string(tensors.size()));
    if (state.m.empty()) {
        for (Tensor* t : tensors) {
            state.m.emplace_back(t->shape());
            state.v.emplace_back(t->shape());
        }
    }
    state.t += 1;
    const double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(state.t));
    const double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(state.t));
    for (std::size_t p = 0; p < tensors.size(); ++p) {
        Tensor& w = *tensors[p];
        const Tensor& g = grads[p];
        Tensor &m = state.m[p], &v = state.v[p];
        for (std::size_t i = 0; i < w.size(); ++i) {
            m[i] = cfg.beta1 * m[i] + (1.0 - cfg.beta1) * g[i];
            v[i] = cfg.beta2 * v[i] + (1.0 - cfg.beta2) * g[i] * g[i];
            const double m_hat = m[i] / bc1;
            const double v_hat = v[i] / bc2;
            w[i] -= cfg.lr * m_hat / (std::sqrt(v_hat) + cfg.eps);
        }
    }
}

std::vector<Triple> sample_negatives(const KnowledgeGraph& graph, const Triple& positive,
                                     std::size_t n, std::mt19937_64& rng) {
    if (n < 1) throw ConfigError("sample_negatives: n must be >= 1");
    if (graph.entity_count() < 2) throw SamplingError("graph has fewer than two entities");

    std::uniform_int_distribution<EntityId> ent(0,
                                                static_cast<EntityId>(graph.entity_count() - 1));
    constexpr std::size_t kTriesPerNegative = 2000;
    std::vector<Triple> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        bool found = false;
        for (std::size_t attempt = 0; attempt < kTriesPerNegative; ++attempt) {
            Triple cand = positive;
            bool corrupt_head = (rng() & 1) != 0;
            (corrupt_head ? cand.head : cand.tail) = ent(rng);
            if (cand == positive || cand.head == cand.tail) continue;
            if (graph.has_triple(cand)) continue;
            out.push_back(cand);
            found = true;
            break;
        }
        if (!found)
            throw SamplingError("no valid corruption found for (" +
                                std::to_string(positive.head) + ", " +
                                std::to_string(positive.rel) + ", " +
                                std::to_string(positive.tail) + ")");
    }
    return out;
}

namespace {

struct ItemResult {
    double loss = 0.0;
    std::vector<Tensor> grads;
};

std::uint64_t mix(std::uint64_t a, std::uint64_t b) {
    a ^= b + 0x9e3779b97f4a7c15ull + (a << 6) + (a >> 2);
    return a;
}

struct SubgraphCache {
    bool enabled = false;
    std::map<std::tuple<EntityId, RelationId, EntityId>, Subgraph> entries;

    const Subgraph& get(const KnowledgeGraph& graph, const RelationVocab& rels,
                        const ExtractionConfig& cfg, const Triple& t) {
        auto key = std::tuple(t.head, t.rel, t.tail);
        auto it = entries.find(key);
        if (it == entries.end())
            it = entries.emplace(key, extract(graph, t.head, t.rel, t.tail, rels, cfg)).first;
        return it->second;
    }
};

}  // namespace

TrainResult train(const DatasetBundle& bundle, const ModelConfig& mcfg, const TrainConfig& tcfg) {
    mcfg.validate();
    tcfg.validate();

    const KnowledgeGraph& graph = bundle.train_graph;
    const RelationVocab& relations = bundle.relations;
    auto positives = base_triples(graph, relations);
    if (positives.empty()) throw DataError("training graph has no base triples");

    ModelParams params = ModelParams::init(mcfg, relations.base_count(), tcfg.seed);
    AdamState adam;
    AdamConfig adam_cfg;
    adam_cfg.lr = tcfg.learning_rate;

    const ExtractionConfig ecfg{.hops = mcfg.hops, .scope = mcfg.scope, .max_nodes = std::nullopt};
    SubgraphCache cache;
    cache.enabled = tcfg.cache_subgraphs;

    std::ofstream log_stream;
    if (!tcfg.log_path.empty()) {
        log_stream.open(tcfg.log_path);
        if (!log_stream) throw DataError("cannot open training log: " + tcfg.log_path.string());
    }

    TrainResult result;
    result.best_hits10 = -1.0;

    auto snapshot = [&](std::uint32_t epoch) {
        Checkpoint c;
        c.params = params;
        c.relations = relations;
        c.epoch = epoch;
        c.adam_step = adam.t;
        c.adam_m = adam.m;
        c.adam_v = adam.v;
        return c;
    };

    for (std::size_t epoch = 1; epoch <= tcfg.max_epochs; ++epoch) {
        auto epoch_start = std::chrono::steady_clock::now();

        std::vector<std::size_t> order(positives.size());
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
        std::mt19937_64 shuffle_rng(mix(tcfg.seed, epoch));
        std::shuffle(order.begin(), order.end(), shuffle_rng);

        double epoch_loss = 0.0;
        std::size_t item_count = 0;

        for (std::size_t batch_start = 0; batch_start < order.size();
             batch_start += tcfg.batch_size) {
            const std::size_t batch_end =
                std::min(order.size(), batch_start + tcfg.batch_size);

            // one slot per positive; each holds the positive and its negatives
            const std::size_t slots = batch_end - batch_start;
            std::vector<ItemResult> results(slots);

            parallel_for(slots, tcfg.workers, [&](std::size_t s) {
                const std::size_t pos_index = order[batch_start + s];
                const Triple& positive = positives[pos_index];
                std::mt19937_64 item_rng(mix(mix(tcfg.seed, epoch), pos_index));

                std::vector<std::pair<Triple, double>> items;
                items.emplace_back(positive, 1.0);
                for (const Triple& neg :
                     sample_negatives(graph, positive, tcfg.negatives_per_positive, item_rng))
                    items.emplace_back(neg, 0.0);

                ItemResult& slot = results[s];
                for (const auto& [triple, label] : items) {
                    Subgraph sg =
                        cache.enabled && tcfg.workers <= 1
                            ? cache.get(graph, relations, ecfg, triple)
                            : extract(graph, triple.head, triple.rel, triple.tail, relations,
                                      ecfg);
                    Tape tape;
                    RestForward fw(tape, sg, params, /*train=*/true, &item_rng);
                    Var score = fw.run();
                    Var loss = tape.bce_loss(score, {label});
                    tape.backward(loss);
                    slot.loss += tape.value(loss)[0];
                    if (slot.grads.empty()) {
                        for (Var v : fw.leaves().vars) slot.grads.push_back(tape.grad(v));
                    } else {
                        std::size_t gi = 0;
                        for (Var v : fw.leaves().vars) {
                            const Tensor& g = tape.grad(v);
                            Tensor& acc = slot.grads[gi++];
                            for (std::size_t i = 0; i < g.size(); ++i) acc[i] += g[i];
                        }
                    }
                }
            });

            const std::size_t batch_items = slots * (1 + tcfg.negatives_per_positive);
            std::vector<Tensor> total;
            double batch_loss = 0.0;
            for (std::size_t s = 0; s < slots; ++s) {  // fixed reduction order
                batch_loss += results[s].loss;
                if (total.empty()) {
                    total = std::move(results[s].grads);
                } else {
                    for (std::size_t p = 0; p < total.size(); ++p) {
                        const Tensor& g = results[s].grads[p];
                        for (std::size_t i = 0; i < g.size(); ++i) total[p][i] += g[i];
                    }
                }
            }
            batch_loss /= static_cast<double>(batch_items);
            for (Tensor& g : total)
                for (std::size_t i = 0; i < g.size(); ++i)
                    g[i] /= static_cast<double>(batch_items);

            if (!std::isfinite(batch_loss)) {
                std::ostringstream msg;
                msg << "non-finite loss " << batch_loss << " in epoch " << epoch << " at batch "
                    << (batch_start / tcfg.batch_size);
                throw RuntimeError(msg.str());
            }
            adam_step(params, total, adam, adam_cfg);
            if (!params.all_finite())
                throw RuntimeError("non-finite parameter after Adam step in epoch " +
                                   std::to_string(epoch));

            epoch_loss += batch_loss * static_cast<double>(batch_items);
            item_count += batch_items;
        }

        EpochLog entry;
        entry.epoch = epoch;
        entry.train_loss = epoch_loss / static_cast<double>(item_count);

        if (epoch % tcfg.valid_every == 0 && !bundle.valid_triples.empty()) {
            RankingConfig rcfg;
            rcfg.num_negatives = tcfg.valid_negatives;
            rcfg.seed = mix(tcfg.seed, 0x7a11d);
            rcfg.workers = tcfg.workers;
            Metrics m = evaluate(make_rest_scorer(params, graph, relations), graph,
                                 bundle.valid_triples, rcfg);
            entry.valid_hits10 = m.hits10;
            if (m.hits10 > result.best_hits10) {
                result.best_hits10 = m.hits10;
                result.best = snapshot(static_cast<std::uint32_t>(epoch));
            }
        }

        entry.seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - epoch_start)
                .count();
        result.log.push_back(entry);
        if (log_stream) {
            log_stream << "{\"epoch\":" << entry.epoch << ",\"train_loss\":" << entry.train_loss
                       << ",\"valid_hits10\":" << entry.valid_hits10
                       << ",\"seconds\":" << entry.seconds << "}\n";
            log_stream.flush();
        }
    }

    result.final = snapshot(static_cast<std::uint32_t>(tcfg.max_epochs));
    if (result.best_hits10 < 0.0) {
        result.best = result.final;  // no validation ran
        result.best_hits10 = 0.0;
    }
    return result;
}

}  // namespace rest
