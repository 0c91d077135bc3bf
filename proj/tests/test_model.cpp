#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "helpers.hpp"
#include "rest/model.hpp"

using namespace rest;
using rest::testing::make_subgraph;
using rest::testing::triangle_subgraph;

namespace {

ModelParams zero_params(const ModelConfig& cfg, std::size_t base_rels) {
    auto p = ModelParams::init(cfg, base_rels, 0);
    p.for_each_tensor([](const std::string&, Tensor& t) {
        for (std::size_t i = 0; i < t.size(); ++i) t[i] = 0.0;
    });
    return p;
}

std::vector<Tensor> flatten(const ModelParams& p) {
    std::vector<Tensor> out;
    p.for_each_tensor([&](const std::string&, const Tensor& t) { out.push_back(t); });
    return out;
}

ModelParams rebuild(const ModelParams& proto, std::span<const Tensor> flat) {
    ModelParams p = proto;
    std::size_t i = 0;
    p.for_each_tensor([&](const std::string&, Tensor& t) { t = flat[i++]; });
    return p;
}

// five edges: query (0->1), 1->2, 2->0, 1->0, 2->1 over three relations
Subgraph five_edge_subgraph() {
    return make_subgraph(3, {{1, 1, 2}, {2, 2, 0}, {1, 2, 0}, {2, 1, 1}}, 0, 0, 1);
}

Subgraph permuted_copy(const Subgraph& sg, const std::vector<std::uint32_t>& node_perm,
                       const std::vector<std::uint32_t>& edge_perm) {
    Subgraph out;
    out.hops = sg.hops;
    out.global_ids.resize(sg.global_ids.size());
    for (std::size_t i = 0; i < sg.global_ids.size(); ++i)
        out.global_ids[node_perm[i]] = sg.global_ids[i];
    out.edges.resize(sg.edges.size());
    for (std::size_t e = 0; e < sg.edges.size(); ++e) {
        const SubEdge& old = sg.edges[e];
        out.edges[edge_perm[e]] = {node_perm[old.src], old.rel, node_perm[old.dst], old.origin};
        if (e == sg.query_edge) out.query_edge = edge_perm[e];
    }
    return out;
}

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

}  // namespace

TEST_CASE("model config validation and the hyperparameter grid") {
    ModelConfig cfg;
    cfg.validate();
    cfg.validate_grid();
    cfg.dim = 8;
    cfg.validate();  // fine structurally
    CHECK_THROWS_AS(cfg.validate_grid(), ConfigError);
    cfg.dim = 16;
    cfg.layers = 7;
    CHECK_THROWS_AS(cfg.validate_grid(), ConfigError);
    cfg.layers = 4;
    cfg.dropout = 0.3;
    CHECK_THROWS_AS(cfg.validate_grid(), ConfigError);
    cfg.dropout = -0.1;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
}

TEST_CASE("single-source init leaves exactly one nonzero edge row") {
    ModelConfig cfg{.dim = 4, .layers = 2};
    auto params = ModelParams::init(cfg, 2, 1);
    auto sg = five_edge_subgraph();

    Tape tape;
    RestForward fw(tape, sg, params);
    auto state = fw.init_state();
    const Tensor& e0 = tape.value(state.E);
    std::size_t nonzero_rows = 0;
    for (std::size_t r = 0; r < e0.rows(); ++r) {
        bool nz = false;
        for (std::size_t c = 0; c < e0.cols(); ++c) nz = nz || e0.at(r, c) != 0.0;
        if (nz) ++nonzero_rows;
    }
    CHECK(nonzero_rows == 1);
    for (std::size_t c = 0; c < e0.cols(); ++c)
        CHECK(e0.at(sg.query_edge, c) == params.rel_emb.at(sg.query_rel(), c));

    // H starts at zero; Q carries the query embedding on every edge
    const Tensor& h0 = tape.value(state.H);
    for (std::size_t i = 0; i < h0.size(); ++i) CHECK(h0[i] == 0.0);
    const Tensor& q0 = tape.value(state.Q);
    for (std::size_t r = 0; r < q0.rows(); ++r)
        for (std::size_t c = 0; c < q0.cols(); ++c)
            CHECK(q0.at(r, c) == params.query_emb.at(sg.query_rel(), c));
}

TEST_CASE("full init ties edge rows of equal relation") {
    ModelConfig cfg{.dim = 4, .layers = 2, .init_mode = InitMode::full};
    auto params = ModelParams::init(cfg, 2, 3);
    auto sg = five_edge_subgraph();

    Tape tape;
    RestForward fw(tape, sg, params);
    auto state = fw.init_state();
    const Tensor& e0 = tape.value(state.E);
    for (std::size_t a = 0; a < sg.edges.size(); ++a)
        for (std::size_t b = 0; b < sg.edges.size(); ++b) {
            if (sg.edges[a].rel != sg.edges[b].rel) continue;
            for (std::size_t c = 0; c < e0.cols(); ++c) CHECK(e0.at(a, c) == e0.at(b, c));
        }
}

TEST_CASE("on a query-only subgraph both init modes coincide") {
    auto sg = make_subgraph(2, {}, 0, 0, 1);
    for (auto mode : {InitMode::single_source, InitMode::full}) {
        ModelConfig cfg{.dim = 3, .layers = 1, .init_mode = mode};
        auto params = ModelParams::init(cfg, 1, 9);
        Tape tape;
        RestForward fw(tape, sg, params);
        auto state = fw.init_state();
        const Tensor& e0 = tape.value(state.E);
        for (std::size_t c = 0; c < e0.cols(); ++c)
            CHECK(e0.at(0, c) == params.rel_emb.at(0, c));
    }
}

TEST_CASE("GRU message at all-zero weights is half the source feature") {
    ModelConfig cfg{.dim = 2, .layers = 1};
    auto params = zero_params(cfg, 1);
    auto sg = rest::testing::two_cycle_subgraph();

    Tape tape;
    RestForward fw(tape, sg, params);
    // hand-made state: nonzero node features, arbitrary edge features
    ForwardState state;
    state.E = tape.constant(Tensor({2, 2}, {0.3, -0.2, 0.9, 0.4}));
    state.Q = tape.constant(Tensor({2, 2}));
    state.H = tape.constant(Tensor({2, 2}, {0.6, -1.0, 0.2, 0.8}));
    Var m = fw.message(state, 0);
    const Tensor& tm = tape.value(m);
    // delta = 0.5, c = 0, so m = 0.5 * h_src; edge 0 has src 0, edge 1 has src 1
    CHECK(tm.at(0, 0) == doctest::Approx(0.3));
    CHECK(tm.at(0, 1) == doctest::Approx(-0.5));
    CHECK(tm.at(1, 0) == doctest::Approx(0.1));
    CHECK(tm.at(1, 1) == doctest::Approx(0.4));
}

TEST_CASE("GRU message vanishes when source and edge features are zero") {
    ModelConfig cfg{.dim = 3, .layers = 1};
    auto params = ModelParams::init(cfg, 1, 4);  // random weights incl. biases
    auto sg = make_subgraph(2, {}, 0, 0, 1);
    Tape tape;
    RestForward fw(tape, sg, params);
    ForwardState state;
    state.E = tape.constant(Tensor({1, 3}));
    state.Q = tape.constant(Tensor({1, 3}));
    state.H = tape.constant(Tensor({2, 3}));
    const Tensor& tm = tape.value(fw.message(state, 0));
    for (std::size_t i = 0; i < tm.size(); ++i) CHECK(tm[i] == doctest::Approx(0.0));
}

TEST_CASE("GRU message matches a hand evaluation in dim 2") {
    ModelConfig cfg{.dim = 2, .layers = 1};
    auto params = zero_params(cfg, 1);
    auto& g = params.gru[0];
    g.w_d1 = Tensor({2, 2}, {0.5, -0.3, 0.2, 0.7});
    g.w_d2 = Tensor({2, 2}, {0.1, 0.4, -0.6, 0.3});
    g.b_d = Tensor({2}, {0.05, -0.1});
    g.w_g1 = Tensor({2, 2}, {-0.2, 0.8, 0.3, 0.1});
    g.w_g2 = Tensor({2, 2}, {0.6, -0.5, 0.2, 0.9});
    g.b_g = Tensor({2}, {0.2, 0.0});
    g.w_c1 = Tensor({2, 2}, {0.7, 0.2, -0.4, 0.5});
    g.w_c2 = Tensor({2, 2}, {0.3, -0.1, 0.8, 0.6});
    params.rel_emb = Tensor({2, 2}, {1.5, -0.5, 0.0, 0.0});

    auto sg = make_subgraph(2, {}, 0, 0, 1);  // one edge, src node 0
    Tape tape;
    RestForward fw(tape, sg, params);
    ForwardState state;
    state.E = tape.constant(Tensor({1, 2}, {0.4, 0.6}));
    state.Q = tape.constant(Tensor({1, 2}));
    state.H = tape.constant(Tensor({2, 2}, {0.25, -0.75, 0.0, 0.0}));
    const Tensor& got = tape.value(fw.message(state, 0));

    // independent arithmetic straight from the printed recurrence
    double in0 = 1.5 * 0.4, in1 = -0.5 * 0.6;
    double h0 = 0.25, h1 = -0.75;
    double d0 = sigmoid(0.5 * in0 - 0.3 * in1 + 0.1 * h0 + 0.4 * h1 + 0.05);
    double d1 = sigmoid(0.2 * in0 + 0.7 * in1 - 0.6 * h0 + 0.3 * h1 - 0.1);
    double r0 = sigmoid(-0.2 * in0 + 0.8 * in1 + 0.6 * h0 - 0.5 * h1 + 0.2);
    double r1 = sigmoid(0.3 * in0 + 0.1 * in1 + 0.2 * h0 + 0.9 * h1 + 0.0);
    double c0 = std::tanh(0.7 * in0 + 0.2 * in1 + 0.3 * (r0 * h0) - 0.1 * (r1 * h1));
    double c1 = std::tanh(-0.4 * in0 + 0.5 * in1 + 0.8 * (r0 * h0) + 0.6 * (r1 * h1));
    CHECK(got.at(0, 0) == doctest::Approx(d0 * c0 + (1 - d0) * h0).epsilon(1e-12));
    CHECK(got.at(0, 1) == doctest::Approx(d1 * c1 + (1 - d1) * h1).epsilon(1e-12));
}

TEST_CASE("SUM and MUL ablation messages") {
    ModelConfig cfg{.dim = 2, .layers = 1, .message_fn = MessageFn::sum};
    auto params = ModelParams::init(cfg, 1, 11);
    auto sg = make_subgraph(2, {}, 0, 0, 1);

    SUBCASE("sum with zero state returns the relation embedding") {
        Tape tape;
        RestForward fw(tape, sg, params);
        ForwardState state;
        state.E = tape.constant(Tensor({1, 2}));
        state.Q = tape.constant(Tensor({1, 2}));
        state.H = tape.constant(Tensor({2, 2}));
        const Tensor& tm = tape.value(fw.message(state, 0));
        CHECK(tm.at(0, 0) == params.rel_emb.at(0, 0));
        CHECK(tm.at(0, 1) == params.rel_emb.at(0, 1));
    }
    SUBCASE("mul with any zero factor is zero") {
        ModelConfig mcfg = cfg;
        mcfg.message_fn = MessageFn::mul;
        auto mparams = ModelParams::init(mcfg, 1, 11);
        Tape tape;
        RestForward fw(tape, sg, mparams);
        ForwardState state;
        state.E = tape.constant(Tensor({1, 2}, {0.5, 0.7}));
        state.Q = tape.constant(Tensor({1, 2}));
        state.H = tape.constant(Tensor({2, 2}));  // zero factor
        const Tensor& tm = tape.value(fw.message(state, 0));
        CHECK(tm[0] == 0.0);
        CHECK(tm[1] == 0.0);
    }
    SUBCASE("sum fixture value") {
        Tape tape;
        RestForward fw(tape, sg, params);
        ForwardState state;
        state.E = tape.constant(Tensor({1, 2}, {0.1, 0.2}));
        state.Q = tape.constant(Tensor({1, 2}));
        state.H = tape.constant(Tensor({2, 2}, {1.0, -1.0, 0.0, 0.0}));
        const Tensor& tm = tape.value(fw.message(state, 0));
        CHECK(tm.at(0, 0) == doctest::Approx(1.0 + 0.1 + params.rel_emb.at(0, 0)));
        CHECK(tm.at(0, 1) == doctest::Approx(-1.0 + 0.2 + params.rel_emb.at(0, 1)));
    }
}

TEST_CASE("PNA aggregation fixtures") {
    ModelConfig cfg{.dim = 2, .layers = 1};
    auto params = ModelParams::init(cfg, 2, 3);
    auto sg = five_edge_subgraph();
    Tape tape;
    RestForward fw(tape, sg, params);

    // messages chosen by hand; destinations per fixture: edges end at 1,2,0,0,1
    Tensor msgs({5, 2}, {1, 2, 3, 4, 5, 6, 7, 8, 9, 10});
    Var m = tape.constant(msgs);
    Var h_prev = tape.constant(Tensor({3, 2}, {0.5, 0.5, -0.5, 0.25, 0.0, 1.0}));
    const Tensor& h = tape.value(fw.aggregate_pna(m, h_prev, 0));

    // node 0 receives rows 2 and 3: mean (6,7), max (7,8), min (5,6), std (1,1)
    const auto& w = params.w_agg[0];
    for (std::size_t c = 0; c < 2; ++c) {
        double expect = w.at(c, 0) * 6 + w.at(c, 1) * 7 + w.at(c, 2) * 7 + w.at(c, 3) * 8 +
                        w.at(c, 4) * 5 + w.at(c, 5) * 6 + w.at(c, 6) * 1 + w.at(c, 7) * 1 +
                        w.at(c, 8) * 0.5 + w.at(c, 9) * 0.5;
        CHECK(h.at(0, c) == doctest::Approx(expect).epsilon(1e-12));
    }
}

TEST_CASE("aggregation of an isolated node with zero history is zero") {
    ModelConfig cfg{.dim = 3, .layers = 1};
    auto params = ModelParams::init(cfg, 1, 5);
    auto sg = make_subgraph(3, {}, 0, 0, 1);  // node 2 has no incoming edges
    Tape tape;
    RestForward fw(tape, sg, params);
    Var m = tape.constant(Tensor({1, 3}, {0.4, 0.5, 0.6}));
    Var h_prev = tape.constant(Tensor({3, 3}));
    const Tensor& h = tape.value(fw.aggregate_pna(m, h_prev, 0));
    for (std::size_t c = 0; c < 3; ++c) CHECK(h.at(2, c) == 0.0);
}

TEST_CASE("singleton aggregation concatenates (m, m, m, 0, h_prev)") {
    ModelConfig cfg{.dim = 2, .layers = 1};
    auto params = ModelParams::init(cfg, 1, 6);
    auto sg = make_subgraph(2, {}, 0, 0, 1);  // only the query edge, into node 1
    Tape tape;
    RestForward fw(tape, sg, params);
    Tensor msg({1, 2}, {2.0, -3.0});
    Var h_prev = tape.constant(Tensor({2, 2}, {0.0, 0.0, 0.7, 0.1}));
    const Tensor& h = tape.value(fw.aggregate_pna(tape.constant(msg), h_prev, 0));
    const auto& w = params.w_agg[0];
    for (std::size_t c = 0; c < 2; ++c) {
        double expect = (w.at(c, 0) + w.at(c, 2) + w.at(c, 4)) * 2.0 +
                        (w.at(c, 1) + w.at(c, 3) + w.at(c, 5)) * -3.0 + w.at(c, 8) * 0.7 +
                        w.at(c, 9) * 0.1;
        CHECK(h.at(1, c) == doctest::Approx(expect).epsilon(1e-12));
    }
}

TEST_CASE("LSTM update edge cases and hand fixture") {
    auto sg = make_subgraph(2, {}, 0, 0, 1);

    SUBCASE("all-zero weights and states produce zero features") {
        ModelConfig cfg{.dim = 2, .layers = 1};
        auto params = zero_params(cfg, 1);
        Tape tape;
        RestForward fw(tape, sg, params);
        ForwardState state;
        state.E = tape.constant(Tensor({1, 2}));
        state.Q = tape.constant(Tensor({1, 2}));
        state.H = tape.constant(Tensor({2, 2}));
        auto [e, q] = fw.update(state, state.H);
        for (std::size_t i = 0; i < 2; ++i) CHECK(tape.value(e)[i] == 0.0);
    }
    SUBCASE("a very negative forget bias empties the cell at zero input") {
        ModelConfig cfg{.dim = 2, .layers = 1};
        auto params = zero_params(cfg, 1);
        params.lstm_b[2] = -40.0;  // forget gate slots are [d, 2d)
        params.lstm_b[3] = -40.0;
        Tape tape;
        RestForward fw(tape, sg, params);
        ForwardState state;
        state.E = tape.constant(Tensor({1, 2}));
        state.Q = tape.constant(Tensor({1, 2}, {5.0, -6.0}));
        state.H = tape.constant(Tensor({2, 2}));
        auto [e, q] = fw.update(state, state.H);
        CHECK(std::abs(tape.value(q)[0]) < 1e-15);
        CHECK(std::abs(tape.value(q)[1]) < 1e-15);
    }
    SUBCASE("dim-2 recurrence matches independent arithmetic") {
        ModelConfig cfg{.dim = 2, .layers = 1};
        auto params = zero_params(cfg, 1);
        std::mt19937_64 rng(21);
        std::uniform_real_distribution<double> dist(-0.5, 0.5);
        for (Tensor* t : {&params.lstm_wx, &params.lstm_wh, &params.lstm_b})
            for (std::size_t i = 0; i < t->size(); ++i) (*t)[i] = dist(rng);

        Tensor x({1, 2}, {0.3, -0.4});
        Tensor cell({1, 2}, {0.2, 0.1});
        Tensor h({2, 2}, {0.5, -0.6, 0.0, 0.0});

        Tape tape;
        RestForward fw(tape, sg, params);
        ForwardState state;
        state.E = tape.constant(x);
        state.Q = tape.constant(cell);
        state.H = tape.constant(Tensor({2, 2}));
        auto [e, q] = fw.update(state, tape.constant(h));

        for (std::size_t c = 0; c < 2; ++c) {
            auto gate = [&](std::size_t row) {
                double z = params.lstm_b[row];
                for (std::size_t p = 0; p < 2; ++p)
                    z += params.lstm_wx.at(row, p) * x[p] + params.lstm_wh.at(row, p) * h[p];
                return z;
            };
            double gi = sigmoid(gate(c));
            double gf = sigmoid(gate(2 + c));
            double gg = std::tanh(gate(4 + c));
            double go = sigmoid(gate(6 + c));
            double qc = gf * cell[c] + gi * gg;
            CHECK(tape.value(q)[c] == doctest::Approx(qc).epsilon(1e-12));
            CHECK(tape.value(e)[c] == doctest::Approx(go * std::tanh(qc)).epsilon(1e-12));
        }
    }
}

TEST_CASE("MLP update: zero weights zero out, identity block preserves E") {
    ModelConfig cfg{.dim = 2, .layers = 1, .update_fn = UpdateFn::mlp};
    auto sg = make_subgraph(2, {}, 0, 0, 1);
    auto params = zero_params(cfg, 1);

    Tape tape;
    RestForward fw(tape, sg, params);
    ForwardState state;
    state.E = tape.constant(Tensor({1, 2}, {0.8, -0.9}));
    state.Q = tape.constant(Tensor({1, 2}, {0.3, 0.4}));
    state.H = tape.constant(Tensor({2, 2}, {1.0, 1.0, 1.0, 1.0}));
    auto [e0, q0] = fw.update(state, state.H);
    CHECK(tape.value(e0)[0] == 0.0);
    CHECK(tape.value(q0)[1] == 0.0);

    // identity block [I 0 0] selects E_prev
    params.mlp_we.at(0, 0) = 1.0;
    params.mlp_we.at(1, 1) = 1.0;
    Tape tape2;
    RestForward fw2(tape2, sg, params);
    ForwardState state2;
    state2.E = tape2.constant(Tensor({1, 2}, {0.8, -0.9}));
    state2.Q = tape2.constant(Tensor({1, 2}, {0.3, 0.4}));
    state2.H = tape2.constant(Tensor({2, 2}, {1.0, 1.0, 1.0, 1.0}));
    auto [e1, q1] = fw2.update(state2, state2.H);
    CHECK(tape2.value(e1)[0] == doctest::Approx(0.8));
    CHECK(tape2.value(e1)[1] == doctest::Approx(-0.9));
}

TEST_CASE("zeroed scorer pins every score at one half") {
    ModelConfig cfg{.dim = 4, .layers = 3};
    auto params = ModelParams::init(cfg, 2, 33);
    params.w_s = Tensor({1, 4});
    params.b_s = Tensor({1});
    CHECK(rest_score(five_edge_subgraph(), params) == doctest::Approx(0.5));
    CHECK(rest_score(triangle_subgraph(), params) == doctest::Approx(0.5));
}

TEST_CASE("all-zero weights score sigmoid(b_s) on the bare query edge") {
    ModelConfig cfg{.dim = 4, .layers = 2};
    auto params = zero_params(cfg, 1);
    params.b_s[0] = 0.7;
    auto sg = make_subgraph(2, {}, 0, 0, 1);
    CHECK(rest_score(sg, params) == doctest::Approx(sigmoid(0.7)));
}

TEST_CASE("forward is deterministic given the parameter seed") {
    ModelConfig cfg{.dim = 8, .layers = 3};
    auto params = ModelParams::init(cfg, 2, 77);
    auto sg = five_edge_subgraph();
    double a = rest_score(sg, params);
    double b = rest_score(sg, params);
    CHECK(a == b);  // bit identical
    auto params2 = ModelParams::init(cfg, 2, 77);
    CHECK(rest_score(sg, params2) == a);
    auto params3 = ModelParams::init(cfg, 2, 78);
    CHECK(rest_score(sg, params3) != a);
}

TEST_CASE("scores are invariant to node and edge permutations") {
    ModelConfig cfg{.dim = 6, .layers = 3};
    auto params = ModelParams::init(cfg, 2, 13);
    auto sg = five_edge_subgraph();
    double base = rest_score(sg, params);

    auto permuted = permuted_copy(sg, {2, 0, 1}, {3, 1, 4, 0, 2});
    double moved = rest_score(permuted, params);
    CHECK(moved == doctest::Approx(base).epsilon(1e-9));
}

TEST_CASE("MUL message with zero biases ignores unreachable relation rows") {
    // query (0->1); detached edge 2 -rel1-> 3 unreachable from node 1
    auto sg = make_subgraph(4, {{2, 1, 3}}, 0, 0, 1);
    ModelConfig cfg{.dim = 4, .layers = 3, .message_fn = MessageFn::mul};
    auto params = ModelParams::init(cfg, 1, 55);
    params.for_each_tensor([](const std::string& name, Tensor& t) {
        if (name.find(".b") != std::string::npos || name == "lstm.b")
            for (std::size_t i = 0; i < t.size(); ++i) t[i] = 0.0;
    });
    double base = rest_score(sg, params);

    auto perturbed = params;
    std::mt19937_64 rng(991);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    for (std::size_t c = 0; c < cfg.dim; ++c) perturbed.rel_emb.at(1, c) = dist(rng);
    CHECK(rest_score(sg, perturbed) == base);
}

TEST_CASE("GRU message does react to relations reachable from v") {
    auto sg = rest::testing::triangle_subgraph();  // v feeds relation 1 onward
    ModelConfig cfg{.dim = 4, .layers = 3};
    auto params = ModelParams::init(cfg, 2, 56);
    double base = rest_score(sg, params);
    auto perturbed = params;
    perturbed.rel_emb.at(1, 0) += 0.5;
    CHECK(rest_score(sg, perturbed) != doctest::Approx(base).epsilon(1e-12));
}

TEST_CASE("SUM message with MLP identity update reduces to the scorer on E0") {
    ModelConfig cfg{.dim = 2, .layers = 3, .message_fn = MessageFn::sum,
                    .update_fn = UpdateFn::mlp};
    auto params = zero_params(cfg, 1);
    params.mlp_we.at(0, 0) = 1.0;  // [I 0 0]
    params.mlp_we.at(1, 1) = 1.0;
    params.rel_emb = Tensor({2, 2}, {0.3, -0.2, 0.0, 0.0});
    params.w_s = Tensor({1, 2}, {1.0, 2.0});
    params.b_s = Tensor({1}, {0.1});
    auto sg = rest::testing::two_cycle_subgraph();
    // E stays at E0, so the score is sigmoid(0.3 - 0.4 + 0.1) = 0.5
    CHECK(rest_score(sg, params) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("leaf registration order matches for_each_tensor for every config") {
    for (auto msg : {MessageFn::gru, MessageFn::sum}) {
        for (auto upd : {UpdateFn::lstm, UpdateFn::mlp}) {
            ModelConfig cfg{.dim = 3, .layers = 2, .message_fn = msg, .update_fn = upd};
            auto params = ModelParams::init(cfg, 2, 1);
            std::vector<std::string> expected;
            params.for_each_tensor(
                [&](const std::string& name, const Tensor&) { expected.push_back(name); });
            Tape tape;
            RestForward fw(tape, make_subgraph(2, {}, 0, 0, 1), params);
            CHECK(fw.leaves().names == expected);
        }
    }
}

TEST_CASE("full model gradients pass central finite differences") {
    ModelConfig cfg{.dim = 4, .layers = 2};
    auto proto = ModelParams::init(cfg, 2, 101);
    auto sg = five_edge_subgraph();

    auto value_fn = [&](std::span<const Tensor> flat) {
        return rest_score(sg, rebuild(proto, flat));
    };
    auto grad_fn = [&](std::span<const Tensor> flat) {
        auto params = rebuild(proto, flat);
        Tape tape;
        RestForward fw(tape, sg, params);
        tape.backward(fw.run());
        std::vector<Tensor> grads;
        for (Var v : fw.leaves().vars) grads.push_back(tape.grad(v));
        return grads;
    };
    std::vector<std::string> names;
    proto.for_each_tensor([&](const std::string& n, const Tensor&) { names.push_back(n); });
    auto report = finite_diff_check(value_fn, grad_fn, flatten(proto), names, 1e-4);
    CHECK_MESSAGE(report.passed, "worst relative error ", report.worst);
}

TEST_CASE("per-layer GRU tensors each pass finite differences individually") {
    ModelConfig cfg{.dim = 3, .layers = 2};
    auto proto = ModelParams::init(cfg, 2, 202);
    auto sg = rest::testing::triangle_subgraph();

    auto value_fn = [&](std::span<const Tensor> flat) {
        return rest_score(sg, rebuild(proto, flat));
    };
    auto grad_fn = [&](std::span<const Tensor> flat) {
        auto params = rebuild(proto, flat);
        Tape tape;
        RestForward fw(tape, sg, params);
        tape.backward(fw.run());
        std::vector<Tensor> grads;
        for (Var v : fw.leaves().vars) grads.push_back(tape.grad(v));
        return grads;
    };
    std::vector<std::string> names;
    proto.for_each_tensor([&](const std::string& n, const Tensor&) { names.push_back(n); });
    auto report = finite_diff_check(value_fn, grad_fn, flatten(proto), names, 1e-4);
    REQUIRE(report.passed);
    std::size_t gru_entries = 0;
    for (const auto& e : report.entries) {
        if (e.name.rfind("gru", 0) == 0) {
            ++gru_entries;
            CHECK_MESSAGE(e.max_rel_err < 1e-4, e.name);
        }
    }
    CHECK(gru_entries == 16);
}
