#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "rest/subgraph.hpp"
#include "rest/tape.hpp"

namespace rest {

enum class MessageFn { gru, sum, mul };
enum class UpdateFn { lstm, mlp };
enum class InitMode { single_source, full };

struct ModelConfig {
    std::size_t dim = 32;
    std::size_t layers = 3;
    double dropout = 0.0;
    MessageFn message_fn = MessageFn::gru;
    UpdateFn update_fn = UpdateFn::lstm;
    InitMode init_mode = InitMode::single_source;
    Scope scope = Scope::enclosing;
    std::uint32_t hops = 3;

    void validate() const;       // structural sanity, any positive sizes
    void validate_grid() const;  // the published hyperparameter grid
};

const char* to_string(MessageFn fn);
const char* to_string(UpdateFn fn);
const char* to_string(InitMode mode);
const char* to_string(Scope scope);
MessageFn message_fn_from(const std::string& s);
UpdateFn update_fn_from(const std::string& s);
InitMode init_mode_from(const std::string& s);
Scope scope_from(const std::string& s);

struct GruLayerParams {
    Tensor w_d1, w_d2, b_d;  // update gate
    Tensor w_g1, w_g2, b_g;  // reset gate
    Tensor w_c1, w_c2;       // candidate, no bias
};

// All trained tensors. GRU weights are per layer; the LSTM (and the MLP
// ablation) share one parameter set across layers, treating layers as time
// steps of the recurrence.
struct ModelParams {
    ModelConfig config;
    Tensor rel_emb;               // [2B, dim]
    Tensor query_emb;             // [2B, dim]
    std::vector<GruLayerParams> gru;
    Tensor lstm_wx, lstm_wh, lstm_b;  // [4d, d], [4d, d], [4d]; gate order i,f,g,o
    Tensor mlp_we, mlp_wq;            // [d, 3d]
    std::vector<Tensor> w_agg;        // per layer [d, 5d]
    Tensor w_s, b_s;                  // [1, d], [1]

    static ModelParams init(const ModelConfig& cfg, std::size_t base_relation_count,
                            std::uint64_t seed);

    std::size_t augmented_relations() const { return rel_emb.rows(); }

    // Visits every allocated tensor in a fixed order; checkpointing, the
    // optimizer and gradient bookkeeping all rely on this order.
    template <typename F>
    void for_each_tensor(F&& fn) {
        visit(*this, fn);
    }
    template <typename F>
    void for_each_tensor(F&& fn) const {
        visit(*this, fn);
    }

    bool all_finite() const;

private:
    template <typename Self, typename F>
    static void visit(Self& self, F&& fn) {
        fn("rel_emb", self.rel_emb);
        fn("query_emb", self.query_emb);
        for (std::size_t l = 0; l < self.gru.size(); ++l) {
            auto& g = self.gru[l];
            std::string p = "gru" + std::to_string(l) + ".";
            fn(p + "w_d1", g.w_d1);
            fn(p + "w_d2", g.w_d2);
            fn(p + "b_d", g.b_d);
            fn(p + "w_g1", g.w_g1);
            fn(p + "w_g2", g.w_g2);
            fn(p + "b_g", g.b_g);
            fn(p + "w_c1", g.w_c1);
            fn(p + "w_c2", g.w_c2);
        }
        if (self.lstm_wx.size() > 0) {
            fn("lstm.wx", self.lstm_wx);
            fn("lstm.wh", self.lstm_wh);
            fn("lstm.b", self.lstm_b);
        }
        if (self.mlp_we.size() > 0) {
            fn("mlp.we", self.mlp_we);
            fn("mlp.wq", self.mlp_wq);
        }
        for (std::size_t l = 0; l < self.w_agg.size(); ++l)
            fn("w_agg" + std::to_string(l), self.w_agg[l]);
        fn("scorer.w", self.w_s);
        fn("scorer.b", self.b_s);
    }
};

// Flat edge indexing of a subgraph for tape ops.
struct EdgeIndexing {
    std::vector<std::uint32_t> src, dst, rel;
    std::uint32_t query_row = 0;
    std::size_t nodes = 0;

    explicit EdgeIndexing(const Subgraph& sg);
};

struct ForwardState {
    Var E;  // [edges, dim] edge features e^k
    Var Q;  // [edges, dim] cell features q^k
    Var H;  // [nodes, dim] node features h^k
    Var M;  // [edges, dim] messages m^k of the last layer run
};

struct GruLayerVars {
    Var w_d1, w_d2, b_d, w_g1, w_g2, b_g, w_c1, w_c2;
};

struct ParamVars {
    Var rel_emb, query_emb;
    std::vector<GruLayerVars> gru;
    Var lstm_wx, lstm_wh, lstm_b;
    Var mlp_we, mlp_wq;
    std::vector<Var> w_agg;
    Var w_s, b_s;

    std::vector<std::string> names;  // aligned with vars
    std::vector<Var> vars;           // for_each_tensor order
};

// One forward pass over one subgraph on one tape. Parameters are registered
// as tape leaves so backward() yields per-tensor gradients.
class RestForward {
public:
    RestForward(Tape& tape, const Subgraph& sg, const ModelParams& params, bool train = false,
                std::mt19937_64* dropout_rng = nullptr);

    ForwardState init_state();
    Var message(const ForwardState& state, std::size_t layer);
    Var aggregate_pna(Var messages, Var h_prev, std::size_t layer);
    std::pair<Var, Var> update(const ForwardState& state, Var h_new);

    // init_state, k x (message -> aggregate -> update), then the scorer
    Var run();

    Tape& tape() noexcept { return tape_; }
    const EdgeIndexing& indexing() const noexcept { return indexing_; }
    const ParamVars& leaves() const noexcept { return leaves_; }

private:
    Var message_gru(const ForwardState& state, std::size_t layer);
    Var message_ablation(const ForwardState& state, MessageFn which);
    std::pair<Var, Var> update_lstm(const ForwardState& state, Var h_new);
    std::pair<Var, Var> update_mlp(const ForwardState& state, Var h_new);

    Tape& tape_;
    const ModelParams& params_;
    EdgeIndexing indexing_;
    bool train_;
    std::mt19937_64* dropout_rng_;
    ParamVars leaves_;
};

// Convenience: score one subgraph on a private tape, no gradients kept.
double rest_score(const Subgraph& sg, const ModelParams& params, bool train = false,
                  std::mt19937_64* dropout_rng = nullptr);

}  // namespace rest
