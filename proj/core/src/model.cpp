#include "rest/model.hpp"

#include <algorithm>
#include <cmath>

namespace rest {

void ModelConfig::validate() const {
    if (dim < 1) throw ConfigError("dim must be >= 1");
    if (layers < 1) throw ConfigError("layers must be >= 1");
    if (dropout < 0.0 || dropout >= 1.0) throw ConfigError("dropout must lie in [0, 1)");
    if (hops < 1) throw ConfigError("hops must be >= 1");
}

void ModelConfig::validate_grid() const {
    validate();
    if (dim != 16 && dim != 32)
        throw ConfigError("dim outside the search grid {16, 32}: " + std::to_string(dim));
    if (layers < 3 || layers > 6)
        throw ConfigError("layers outside the search grid {3,4,5,6}: " + std::to_string(layers));
    if (dropout != 0.0 && dropout != 0.1 && dropout != 0.2)
        throw ConfigError("dropout outside the search grid {0, 0.1, 0.2}");
}

const char* to_string(MessageFn fn) {
    switch (fn) {
        case MessageFn::gru: return "gru";
        case MessageFn::sum: return "sum";
        case MessageFn::mul: return "mul";
    }
    return "?";
}

const char* to_string(UpdateFn fn) { return fn == UpdateFn::lstm ? "lstm" : "mlp"; }

const char* to_string(InitMode mode) {
    return mode == InitMode::single_source ? "single_source" : "full";
}

const char* to_string(Scope scope) { return scope == Scope::enclosing ? "enclosing" : "unclosing"; }

MessageFn message_fn_from(const std::string& s) {
    if (s == "gru") return MessageFn::gru;
    if (s == "sum") return MessageFn::sum;
    if (s == "mul") return MessageFn::mul;
    throw ConfigError("unknown message_fn: " + s);
}

UpdateFn update_fn_from(const std::string& s) {
    if (s == "lstm") return UpdateFn::lstm;
    if (s == "mlp") return UpdateFn::mlp;
    throw ConfigError("unknown update_fn: " + s);
}

InitMode init_mode_from(const std::string& s) {
    if (s == "single_source") return InitMode::single_source;
    if (s == "full") return InitMode::full;
    throw ConfigError("unknown init_mode: " + s);
}

Scope scope_from(const std::string& s) {
    if (s == "enclosing") return Scope::enclosing;
    if (s == "unclosing") return Scope::unclosing;
    throw ConfigError("unknown scope: " + s);
}

ModelParams ModelParams::init(const ModelConfig& cfg, std::size_t base_relation_count,
                              std::uint64_t seed) {
    cfg.validate();
    if (base_relation_count < 1) throw ConfigError("at least one base relation required");

    ModelParams p;
    p.config = cfg;
    const std::size_t d = cfg.dim;
    const std::size_t rels = 2 * base_relation_count;

    p.rel_emb = Tensor({rels, d});
    p.query_emb = Tensor({rels, d});
    if (cfg.message_fn == MessageFn::gru) {
        p.gru.resize(cfg.layers);
        for (auto& g : p.gru) {
            g.w_d1 = Tensor({d, d});
            g.w_d2 = Tensor({d, d});
            g.b_d = Tensor({d});
            g.w_g1 = Tensor({d, d});
            g.w_g2 = Tensor({d, d});
            g.b_g = Tensor({d});
            g.w_c1 = Tensor({d, d});
            g.w_c2 = Tensor({d, d});
        }
    }
    if (cfg.update_fn == UpdateFn::lstm) {
        p.lstm_wx = Tensor({4 * d, d});
        p.lstm_wh = Tensor({4 * d, d});
        p.lstm_b = Tensor({4 * d});
    } else {
        p.mlp_we = Tensor({d, 3 * d});
        p.mlp_wq = Tensor({d, 3 * d});
    }
    p.w_agg.resize(cfg.layers);
    for (auto& w : p.w_agg) w = Tensor({d, 5 * d});
    p.w_s = Tensor({1, d});
    p.b_s = Tensor({1});

    const double bound = 1.0 / std::sqrt(static_cast<double>(d));
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> dist(-bound, bound);
    p.for_each_tensor([&](const std::string&, Tensor& t) {
        for (std::size_t i = 0; i < t.size(); ++i) t[i] = dist(rng);
    });
    return p;
}

bool ModelParams::all_finite() const {
    bool ok = true;
    for_each_tensor([&](const std::string&, const Tensor& t) { ok = ok && t.all_finite(); });
    return ok;
}

EdgeIndexing::EdgeIndexing(const Subgraph& sg) {
    nodes = sg.node_count();
    query_row = sg.query_edge;
    src.reserve(sg.edges.size());
    dst.reserve(sg.edges.size());
    rel.reserve(sg.edges.size());
    for (const SubEdge& e : sg.edges) {
        src.push_back(e.src);
        dst.push_back(e.dst);
        rel.push_back(e.rel);
    }
}

RestForward::RestForward(Tape& tape, const Subgraph& sg, const ModelParams& params, bool train,
                         std::mt19937_64* dropout_rng)
    : tape_(tape), params_(params), indexing_(sg), train_(train), dropout_rng_(dropout_rng) {
    params.config.validate();
    for (auto r : indexing_.rel)
        if (r >= params.augmented_relations())
            throw ConfigError("subgraph relation id " + std::to_string(r) +
                              " outside the embedding table");
    if (train_ && params.config.dropout > 0.0 && dropout_rng_ == nullptr)
        throw ConfigError("training with dropout requires an RNG");

    // leaf registration order must mirror ModelParams::for_each_tensor
    auto add = [&](const std::string& name, const Tensor& t) {
        Var v = tape_.leaf(t);
        leaves_.names.push_back(name);
        leaves_.vars.push_back(v);
        return v;
    };
    leaves_.rel_emb = add("rel_emb", params.rel_emb);
    leaves_.query_emb = add("query_emb", params.query_emb);
    for (std::size_t l = 0; l < params.gru.size(); ++l) {
        const auto& g = params.gru[l];
        std::string p = "gru" + std::to_string(l) + ".";
        GruLayerVars v;
        v.w_d1 = add(p + "w_d1", g.w_d1);
        v.w_d2 = add(p + "w_d2", g.w_d2);
        v.b_d = add(p + "b_d", g.b_d);
        v.w_g1 = add(p + "w_g1", g.w_g1);
        v.w_g2 = add(p + "w_g2", g.w_g2);
        v.b_g = add(p + "b_g", g.b_g);
        v.w_c1 = add(p + "w_c1", g.w_c1);
        v.w_c2 = add(p + "w_c2", g.w_c2);
        leaves_.gru.push_back(v);
    }
    if (params.lstm_wx.size() > 0) {
        leaves_.lstm_wx = add("lstm.wx", params.lstm_wx);
        leaves_.lstm_wh = add("lstm.wh", params.lstm_wh);
        leaves_.lstm_b = add("lstm.b", params.lstm_b);
    }
    if (params.mlp_we.size() > 0) {
        leaves_.mlp_we = add("mlp.we", params.mlp_we);
        leaves_.mlp_wq = add("mlp.wq", params.mlp_wq);
    }
    for (std::size_t l = 0; l < params.w_agg.size(); ++l)
        leaves_.w_agg.push_back(add("w_agg" + std::to_string(l), params.w_agg[l]));
    leaves_.w_s = add("scorer.w", params.w_s);
    leaves_.b_s = add("scorer.b", params.b_s);
}

ForwardState RestForward::init_state() {
    const std::size_t edges = indexing_.rel.size(), d = params_.config.dim;

    ForwardState state;
    Var by_relation = tape_.gather_rows(leaves_.rel_emb, indexing_.rel);
    if (params_.config.init_mode == InitMode::single_source) {
        Tensor mask({edges, d});
        for (std::size_t j = 0; j < d; ++j) mask.at(indexing_.query_row, j) = 1.0;
        state.E = tape_.hadamard(by_relation, tape_.constant(std::move(mask)));
    } else {
        state.E = by_relation;
    }
    // every edge shares the query-relation cell
    std::vector<std::uint32_t> query_rel_rows(edges, indexing_.rel[indexing_.query_row]);
    state.Q = tape_.gather_rows(leaves_.query_emb, std::move(query_rel_rows));
    state.H = tape_.constant(Tensor({indexing_.nodes, d}));
    return state;
}

Var RestForward::message(const ForwardState& state, std::size_t layer) {
    switch (params_.config.message_fn) {
        case MessageFn::gru: return message_gru(state, layer);
        case MessageFn::sum: return message_ablation(state, MessageFn::sum);
        case MessageFn::mul: return message_ablation(state, MessageFn::mul);
    }
    throw ConfigError("unreachable message_fn");
}

Var RestForward::message_gru(const ForwardState& state, std::size_t layer) {
    if (layer >= leaves_.gru.size()) throw ConfigError("GRU layer index out of range");
    const GruLayerVars& g = leaves_.gru[layer];

    Var r = tape_.gather_rows(leaves_.rel_emb, indexing_.rel);
    Var input = tape_.hadamard(r, state.E);                      // r_y (.) e
    Var h_src = tape_.gather_rows(state.H, indexing_.src);

    Var delta = tape_.sigmoid(
        tape_.add(tape_.linear(input, g.w_d1, g.b_d), tape_.linear(h_src, g.w_d2)));
    Var gamma = tape_.sigmoid(
        tape_.add(tape_.linear(input, g.w_g1, g.b_g), tape_.linear(h_src, g.w_g2)));
    // candidate activation carries no bias term
    Var cand = tape_.tanh(tape_.add(tape_.linear(input, g.w_c1),
                                    tape_.linear(tape_.hadamard(gamma, h_src), g.w_c2)));

    Var ones = tape_.constant(Tensor({indexing_.rel.size(), params_.config.dim},
                                     std::vector<double>(indexing_.rel.size() * params_.config.dim,
                                                         1.0)));
    return tape_.add(tape_.hadamard(delta, cand),
                     tape_.hadamard(tape_.sub(ones, delta), h_src));
}

Var RestForward::message_ablation(const ForwardState& state, MessageFn which) {
    Var r = tape_.gather_rows(leaves_.rel_emb, indexing_.rel);
    Var h_src = tape_.gather_rows(state.H, indexing_.src);
    if (which == MessageFn::sum) return tape_.add(tape_.add(h_src, state.E), r);
    return tape_.hadamard(tape_.hadamard(h_src, state.E), r);
}

Var RestForward::aggregate_pna(Var messages, Var h_prev, std::size_t layer) {
    if (layer >= leaves_.w_agg.size()) throw ConfigError("aggregation layer index out of range");
    Var mean = tape_.segment_mean(messages, indexing_.dst, indexing_.nodes);
    Var mx = tape_.segment_max(messages, indexing_.dst, indexing_.nodes);
    Var mn = tape_.segment_min(messages, indexing_.dst, indexing_.nodes);
    Var sd = tape_.segment_std(messages, indexing_.dst, indexing_.nodes);
    std::vector<Var> parts{mean, mx, mn, sd, h_prev};
    Var h = tape_.linear(tape_.concat_cols(parts), leaves_.w_agg[layer]);
    if (train_ && params_.config.dropout > 0.0)
        h = tape_.dropout(h, params_.config.dropout, true, *dropout_rng_);
    return h;
}

std::pair<Var, Var> RestForward::update(const ForwardState& state, Var h_new) {
    return params_.config.update_fn == UpdateFn::lstm ? update_lstm(state, h_new)
                                                      : update_mlp(state, h_new);
}

std::pair<Var, Var> RestForward::update_lstm(const ForwardState& state, Var h_new) {
    const std::size_t d = params_.config.dim;
    Var h_src = tape_.gather_rows(h_new, indexing_.src);
    Var z = tape_.add(tape_.linear(state.E, leaves_.lstm_wx, leaves_.lstm_b),
                      tape_.linear(h_src, leaves_.lstm_wh));
    Var gate_i = tape_.sigmoid(tape_.slice_cols(z, 0, d));
    Var gate_f = tape_.sigmoid(tape_.slice_cols(z, d, 2 * d));
    Var gate_g = tape_.tanh(tape_.slice_cols(z, 2 * d, 3 * d));
    Var gate_o = tape_.sigmoid(tape_.slice_cols(z, 3 * d, 4 * d));
    Var cell = tape_.add(tape_.hadamard(gate_f, state.Q), tape_.hadamard(gate_i, gate_g));
    Var hidden = tape_.hadamard(gate_o, tape_.tanh(cell));
    return {hidden, cell};
}

std::pair<Var, Var> RestForward::update_mlp(const ForwardState& state, Var h_new) {
    Var h_src = tape_.gather_rows(h_new, indexing_.src);
    std::vector<Var> parts{state.E, state.Q, h_src};
    Var cat = tape_.concat_cols(parts);
    return {tape_.linear(cat, leaves_.mlp_we), tape_.linear(cat, leaves_.mlp_wq)};
}

Var RestForward::run() {
    ForwardState state = init_state();
    for (std::size_t layer = 0; layer < params_.config.layers; ++layer) {
        state.M = message(state, layer);
        Var h = aggregate_pna(state.M, state.H, layer);
        auto [e, q] = update(state, h);
        state.E = e;
        state.Q = q;
        state.H = h;
    }
    Var query_feature = tape_.gather_rows(state.E, {indexing_.query_row});
    return tape_.sigmoid(tape_.linear(query_feature, leaves_.w_s, leaves_.b_s));
}

double rest_score(const Subgraph& sg, const ModelParams& params, bool train,
                  std::mt19937_64* dropout_rng) {
    Tape tape;
    RestForward forward(tape, sg, params, train, dropout_rng);
    return tape.value(forward.run())[0];
}

}  // namespace rest
