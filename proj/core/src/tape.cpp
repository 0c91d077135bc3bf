#include "rest/tape.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace rest {

namespace {

void require(bool ok, const char* op, const std::string& detail) {
    if (!ok) throw RuntimeError(std::string("shape error in ") + op + ": " + detail);
}

}  // namespace

Var Tape::push(Tensor value, bool needs_grad,
               std::function<void(Tape&, std::uint32_t)> backprop) {
    if (ran_backward_) throw RuntimeError("tape already ran backward; build a fresh tape");
    nodes_.push_back({std::move(value), needs_grad, std::move(backprop)});
    return Var{static_cast<std::uint32_t>(nodes_.size() - 1)};
}

void Tape::check(Var v, const char* op) const {
    if (!v.valid() || v.id >= nodes_.size())
        throw RuntimeError(std::string("invalid Var passed to ") + op);
}

Var Tape::leaf(const Tensor& value) { return push(value, true, {}); }

Var Tape::constant(Tensor value) { return push(std::move(value), false, {}); }

const Tensor& Tape::value(Var v) const {
    check(v, "value");
    return nodes_[v.id].value;
}

const Tensor& Tape::grad(Var v) const {
    check(v, "grad");
    if (!ran_backward_) throw RuntimeError("grad() before backward()");
    return grads_[v.id];
}

Var Tape::add(Var a, Var b) {
    check(a, "add");
    check(b, "add");
    const Tensor &ta = val(a.id), &tb = val(b.id);
    require(ta.same_shape(tb), "add", ta.shape_str() + " vs " + tb.shape_str());
    Tensor out = ta;
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += tb[i];
    bool ng = nodes_[a.id].needs_grad || nodes_[b.id].needs_grad;
    return push(std::move(out), ng, [a, b](Tape& t, std::uint32_t self) {
        const Tensor& g = t.grads_[self];
        Tensor &ga = t.grad_ref(a.id), &gb = t.grad_ref(b.id);
        for (std::size_t i = 0; i < g.size(); ++i) {
            ga[i] += g[i];
            gb[i] += g[i];
        }
    });
}

Var Tape::sub(Var a, Var b) {
    check(a, "sub");
    check(b, "sub");
    const Tensor &ta = val(a.id), &tb = val(b.id);
    require(ta.same_shape(tb), "sub", ta.shape_str() + " vs " + tb.shape_str());
    Tensor out = ta;
    for (std::size_t i = 0; i < out.size(); ++i) out[i] -= tb[i];
    bool ng = nodes_[a.id].needs_grad || nodes_[b.id].needs_grad;
    return push(std::move(out), ng, [a, b](Tape& t, std::uint32_t self) {
        const Tensor& g = t.grads_[self];
        Tensor &ga = t.grad_ref(a.id), &gb = t.grad_ref(b.id);
        for (std::size_t i = 0; i < g.size(); ++i) {
            ga[i] += g[i];
            gb[i] -= g[i];
        }
    });
}

Var Tape::hadamard(Var a, Var b) {
    check(a, "hadamard");
    check(b, "hadamard");
    const Tensor &ta = val(a.id), &tb = val(b.id);
    require(ta.same_shape(tb), "hadamard", ta.shape_str() + " vs " + tb.shape_str());
    Tensor out = ta;
    for (std::size_t i = 0; i < out.size(); ++i) out[i] *= tb[i];
    bool ng = nodes_[a.id].needs_grad || nodes_[b.id].needs_grad;
    return push(std::move(out), ng, [a, b](Tape& t, std::uint32_t self) {
        const Tensor& g = t.grads_[self];
        const Tensor &ta = t.val(a.id), &tb = t.val(b.id);
        Tensor &ga = t.grad_ref(a.id), &gb = t.grad_ref(b.id);
        for (std::size_t i = 0; i < g.size(); ++i) {
            ga[i] += g[i] * tb[i];
            gb[i] += g[i] * ta[i];
        }
    });
}

Var Tape::scale(Var a, double c) {
    check(a, "scale");
    Tensor out = val(a.id);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] *= c;
    return push(std::move(out), nodes_[a.id].needs_grad, [a, c](Tape& t, std::uint32_t self) {
        const Tensor& g = t.grads_[self];
        Tensor& ga = t.grad_ref(a.id);
        for (std::size_t i = 0; i < g.size(); ++i) ga[i] += c * g[i];
    });
}

Var Tape::matmul(Var a, Var b) {
    check(a, "matmul");
    check(b, "matmul");
    const Tensor &ta = val(a.id), &tb = val(b.id);
    require(ta.rank() == 2 && tb.rank() == 2 && ta.cols() == tb.rows(), "matmul",
            ta.shape_str() + " x " + tb.shape_str());
    const std::size_t m = ta.rows(), k = ta.cols(), n = tb.cols();
    Tensor out({m, n});
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t p = 0; p < k; ++p) {
            double av = ta.at(i, p);
            if (av == 0.0) continue;
            for (std::size_t j = 0; j < n; ++j) out.at(i, j) += av * tb.at(p, j);
        }
    bool ng = nodes_[a.id].needs_grad || nodes_[b.id].needs_grad;
    return push(std::move(out), ng, [a, b, m, k, n](Tape& t, std::uint32_t self) {
        const Tensor& g = t.grads_[self];
        const Tensor &ta = t.val(a.id), &tb = t.val(b.id);
        Tensor &ga = t.grad_ref(a.id), &gb = t.grad_ref(b.id);
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = 0; j < n; ++j) {
                double gv = g.at(i, j);
                if (gv == 0.0) continue;
                for (std::size_t p = 0; p < k; ++p) {
                    ga.at(i, p) += gv * tb.at(p, j);
                    gb.at(p, j) += ta.at(i, p) * gv;
                }
            }
    });
}

Var Tape::linear(Var x, Var w, Var bias) {
    check(x, "linear");
    check(w, "linear");
    const Tensor &tx = val(x.id), &tw = val(w.id);
    require(tx.rank() == 2 && tw.rank() == 2 && tx.cols() == tw.cols(), "linear",
            tx.shape_str() + " x " + tw.shape_str() + "^T");
    const std::size_t n = tx.rows(), in = tx.cols(), out_dim = tw.rows();
    if (bias.valid()) {
        check(bias, "linear");
        const Tensor& tb = val(bias.id);
        require(tb.rank() == 1 && tb.size() == out_dim, "linear bias",
                tb.shape_str() + " for out dim " + std::to_string(out_dim));
    }
    Tensor out({n, out_dim});
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t o = 0; o < out_dim; ++o) {
            double acc = bias.valid() ? val(bias.id)[o] : 0.0;
            for (std::size_t p = 0; p < in; ++p) acc += tx.at(i, p) * tw.at(o, p);
            out.at(i, o) = acc;
        }
    bool ng = nodes_[x.id].needs_grad || nodes_[w.id].needs_grad ||
              (bias.valid() && nodes_[bias.id].needs_grad);
    return push(std::move(out), ng, [x, w, bias, n, in, out_dim](Tape& t, std::uint32_t self) {
        const Tensor& g = t.grads_[self];
        const Tensor &tx = t.val(x.id), &tw = t.val(w.id);
        Tensor &gx = t.grad_ref(x.id), &gw = t.grad_ref(w.id);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t o = 0; o < out_dim; ++o) {
                double gv = g.at(i, o);
                if (gv == 0.0) continue;
                for (std::size_t p = 0; p < in; ++p) {
                    gx.at(i, p) += gv * tw.at(o, p);
                    gw.at(o, p) += gv * tx.at(i, p);
                }
            }
        if (bias.valid()) {
            Tensor& gb = t.grad_ref(bias.id);
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t o = 0; o < out_dim; ++o) gb[o] += g.at(i, o);
        }
    });
}

Var Tape::sigmoid(Var a) {
    check(a, "sigmoid");
    Tensor out = val(a.id);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = 1.0 / (1.0 + std::exp(-out[i]));
    return push(std::move(out), nodes_[a.id].needs_grad, [a](Tape& t, std::uint32_t self) {
        const Tensor& g = t.grads_[self];
        const Tensor& y = t.val(self);
        Tensor& ga = t.grad_ref(a.id);
        for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i] * y[i] * (1.0 - y[i]);
    });
}

Var Tape::tanh(Var a) {
    check(a, "tanh");
    Tensor out = val(a.id);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::tanh(out[i]);
    return push(std::move(out), nodes_[a.id].needs_grad, [a](Tape& t, std::uint32_t self) {
        const Tensor& g = t.grads_[self];
        const Tensor& y = t.val(self);
        Tensor& ga = t.grad_ref(a.id);
        for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i] * (1.0 - y[i] * y[i]);
    });
}

Var Tape::concat_cols(std::span<const Var> parts) {
    require(!parts.empty(), "concat_cols", "no inputs");
    std::size_t rows = 0, total_cols = 0;
    bool ng = false;
    for (std::size_t p = 0; p < parts.size(); ++p) {
        check(parts[p], "concat_cols");
        const Tensor& tp = val(parts[p].id);
        require(tp.rank() == 2, "concat_cols", tp.shape_str());
        if (p == 0) rows = tp.rows();
        require(tp.rows() == rows, "concat_cols", "row mismatch");
        total_cols += tp.cols();
        ng = ng || nodes_[parts[p].id].needs_grad;
    }
    Tensor out({rows, total_cols});
    std::size_t offset = 0;
    for (Var p : parts) {
        const Tensor& tp = val(p.id);
        for (std::size_t i = 0; i < rows; ++i)
            for (std::size_t j = 0; j < tp.cols(); ++j) out.at(i, offset + j) = tp.at(i, j);
        offset += tp.cols();
    }
    std::vector<Var> owned(parts.begin(), parts.end());
    return push(std::move(out), ng, [owned, rows](Tape& t, std::uint32_t self) {
        const Tensor& g = t.grads_[self];
        std::size_t offset = 0;
        for (Var p : owned) {
            Tensor& gp = t.grad_ref(p.id);
            const std::size_t c = t.val(p.id).cols();
            for (std::size_t i = 0; i < rows; ++i)
                for (std::size_t j = 0; j < c; ++j) gp.at(i, j) += g.at(i, offset + j);
            offset += c;
        }
    });
}

Var Tape::slice_cols(Var a, std::size_t from, std::size_t to) {
    check(a, "slice_cols");
    const Tensor& ta = val(a.id);
    require(ta.rank() == 2 && from < to && to <= ta.cols(), "slice_cols",
            ta.shape_str() + " [" + std::to_string(from) + "," + std::to_string(to) + ")");
    Tensor out({ta.rows(), to - from});
    for (std::size_t i = 0; i < ta.rows(); ++i)
        for (std::size_t j = from; j < to; ++j) out.at(i, j - from) = ta.at(i, j);
    return push(std::move(out), nodes_[a.id].needs_grad, [a, from, to](Tape& t, std::uint32_t self) {
        const Tensor& g = t.grads_[self];
        Tensor& ga = t.grad_ref(a.id);
        for (std::size_t i = 0; i < g.rows(); ++i)
            for (std::size_t j = from; j < to; ++j) ga.at(i, j) += g.at(i, j - from);
    });
}

Var Tape::gather_rows(Var a, std::vector<std::uint32_t> idx) {
    check(a, "gather_rows");
    const Tensor& ta = val(a.id);
    require(ta.rank() == 2, "gather_rows", ta.shape_str());
    for (auto i : idx)
        require(i < ta.rows(), "gather_rows", "row index " + std::to_string(i) + " out of range");
    Tensor out({idx.size(), ta.cols()});
    for (std::size_t i = 0; i < idx.size(); ++i)
        for (std::size_t j = 0; j < ta.cols(); ++j) out.at(i, j) = ta.at(idx[i], j);
    return push(std::move(out), nodes_[a.id].needs_grad, [a, idx = std::move(idx)](Tape& t, std::uint32_t self) {
        const Tensor& g = t.grads_[self];
        Tensor& ga = t.grad_ref(a.id);
        for (std::size_t i = 0; i < idx.size(); ++i)
            for (std::size_t j = 0; j < g.cols(); ++j) ga.at(idx[i], j) += g.at(i, j);
    });
}

Var Tape::scatter_add_rows(Var a, std::vector<std::uint32_t> idx, std::size_t out_rows) {
    check(a, "scatter_add_rows");
    const Tensor& ta = val(a.id);
    require(ta.rank() == 2 && ta.rows() == idx.size(), "scatter_add_rows",
            ta.shape_str() + " with " + std::to_string(idx.size()) + " indices");
    for (auto i : idx)
        require(i < out_rows, "scatter_add_rows", "row index out of range");
    Tensor out({out_rows, ta.cols()});
    for (std::size_t i = 0; i < idx.size(); ++i)
        for (std::size_t j = 0; j < ta.cols(); ++j) out.at(idx[i], j) += ta.at(i, j);
    return push(std::move(out), nodes_[a.id].needs_grad, [a, idx = std::move(idx)](Tape& t, std::uint32_t self) {
        const Tensor& g = t.grads_[self];
        Tensor& ga = t.grad_ref(a.id);
        for (std::size_t i = 0; i < idx.size(); ++i)
            for (std::size_t j = 0; j < g.cols(); ++j) ga.at(i, j) += g.at(idx[i], j);
    });
}

namespace {

void check_segments(const Tensor& m, const std::vector<std::uint32_t>& seg, std::size_t groups,
                    const char* op) {
    require(m.rank() == 2 && m.rows() == seg.size(), op,
            m.shape_str() + " with " + std::to_string(seg.size()) + " segment ids");
    for (auto s : seg) require(s < groups, op, "segment id out of range");
}

std::vector<std::uint32_t> group_sizes(const std::vector<std::uint32_t>& seg, std::size_t groups) {
    std::vector<std::uint32_t> n(groups, 0);
    for (auto s : seg) ++n[s];
    return n;
}

}  // namespace

Var Tape::segment_mean(Var m, std::vector<std::uint32_t> seg, std::size_t groups) {
    check(m, "segment_mean");
    const Tensor& tm = val(m.id);
    check_segments(tm, seg, groups, "segment_mean");
    auto counts = group_sizes(seg, groups);
    Tensor out({groups, tm.cols()});
    for (std::size_t i = 0; i < seg.size(); ++i)
        for (std::size_t j = 0; j < tm.cols(); ++j) out.at(seg[i], j) += tm.at(i, j);
    for (std::size_t s = 0; s < groups; ++s)
        if (counts[s] > 0)
            for (std::size_t j = 0; j < tm.cols(); ++j) out.at(s, j) /= counts[s];
    return push(std::move(out), nodes_[m.id].needs_grad,
                [m, seg = std::move(seg), counts = std::move(counts)](Tape& t, std::uint32_t self) {
                    const Tensor& g = t.grads_[self];
                    Tensor& gm = t.grad_ref(m.id);
                    for (std::size_t i = 0; i < seg.size(); ++i)
                        for (std::size_t j = 0; j < g.cols(); ++j)
                            gm.at(i, j) += g.at(seg[i], j) / counts[seg[i]];
                });
}

// segment_max and segment_min share their shape; extreme() picks the winner.
Var Tape::segment_max(Var m, std::vector<std::uint32_t> seg, std::size_t groups) {
    check(m, "segment_max");
    const Tensor& tm = val(m.id);
    check_segments(tm, seg, groups, "segment_max");
    Tensor out({groups, tm.cols()});
    // argmax row per (group, column); -1 marks an empty group (output 0)
    std::vector<std::int64_t> arg(groups * tm.cols(), -1);
    for (std::size_t i = 0; i < seg.size(); ++i)
        for (std::size_t j = 0; j < tm.cols(); ++j) {
            auto& slot = arg[seg[i] * tm.cols() + j];
            if (slot < 0 || tm.at(i, j) > out.at(seg[i], j)) {
                slot = static_cast<std::int64_t>(i);
                out.at(seg[i], j) = tm.at(i, j);
            }
        }
    return push(std::move(out), nodes_[m.id].needs_grad,
                [m, cols = tm.cols(), arg = std::move(arg)](Tape& t, std::uint32_t self) {
                    const Tensor& g = t.grads_[self];
                    Tensor& gm = t.grad_ref(m.id);
                    for (std::size_t s = 0; s < g.rows(); ++s)
                        for (std::size_t j = 0; j < cols; ++j) {
                            auto i = arg[s * cols + j];
                            if (i >= 0) gm.at(static_cast<std::size_t>(i), j) += g.at(s, j);
                        }
                });
}

Var Tape::segment_min(Var m, std::vector<std::uint32_t> seg, std::size_t groups) {
    check(m, "segment_min");
    const Tensor& tm = val(m.id);
    check_segments(tm, seg, groups, "segment_min");
    Tensor out({groups, tm.cols()});
    std::vector<std::int64_t> arg(groups * tm.cols(), -1);
    for (std::size_t i = 0; i < seg.size(); ++i)
        for (std::size_t j = 0; j < tm.cols(); ++j) {
            auto& slot = arg[seg[i] * tm.cols() + j];
            if (slot < 0 || tm.at(i, j) < out.at(seg[i], j)) {
                slot = static_cast<std::int64_t>(i);
                out.at(seg[i], j) = tm.at(i, j);
            }
        }
    return push(std::move(out), nodes_[m.id].needs_grad,
                [m, cols = tm.cols(), arg = std::move(arg)](Tape& t, std::uint32_t self) {
                    const Tensor& g = t.grads_[self];
                    Tensor& gm = t.grad_ref(m.id);
                    for (std::size_t s = 0; s < g.rows(); ++s)
                        for (std::size_t j = 0; j < cols; ++j) {
                            auto i = arg[s * cols + j];
                            if (i >= 0) gm.at(static_cast<std::size_t>(i), j) += g.at(s, j);
                        }
                });
}

Var Tape::segment_std(Var m, std::vector<std::uint32_t> seg, std::size_t groups) {
    check(m, "segment_std");
    const Tensor& tm = val(m.id);
    check_segments(tm, seg, groups, "segment_std");
    auto counts = group_sizes(seg, groups);
    const std::size_t cols = tm.cols();

    // population std per group and column, two-pass; empty and singleton
    // groups produce 0 and propagate zero gradients
    Tensor mean({groups, cols});
    for (std::size_t i = 0; i < seg.size(); ++i)
        for (std::size_t j = 0; j < cols; ++j) mean.at(seg[i], j) += tm.at(i, j);
    for (std::size_t s = 0; s < groups; ++s)
        if (counts[s] > 0)
            for (std::size_t j = 0; j < cols; ++j) mean.at(s, j) /= counts[s];

    Tensor out({groups, cols});
    for (std::size_t i = 0; i < seg.size(); ++i)
        for (std::size_t j = 0; j < cols; ++j) {
            double d = tm.at(i, j) - mean.at(seg[i], j);
            out.at(seg[i], j) += d * d;
        }
    for (std::size_t s = 0; s < groups; ++s)
        for (std::size_t j = 0; j < cols; ++j)
            out.at(s, j) = counts[s] > 0 ? std::sqrt(out.at(s, j) / counts[s]) : 0.0;

    return push(std::move(out), nodes_[m.id].needs_grad,
                [m, seg = std::move(seg), counts = std::move(counts),
                 mean = std::move(mean)](Tape& t, std::uint32_t self) {
        const Tensor& g = t.grads_[self];
        const Tensor& y = t.val(self);
        const Tensor& tm = t.val(m.id);
        Tensor& gm = t.grad_ref(m.id);
        for (std::size_t i = 0; i < seg.size(); ++i)
            for (std::size_t j = 0; j < g.cols(); ++j) {
                double sd = y.at(seg[i], j);
                if (sd <= 0.0) continue;  // subgradient 0 at the kink
                double d = tm.at(i, j) - mean.at(seg[i], j);
                gm.at(i, j) += g.at(seg[i], j) * d / (counts[seg[i]] * sd);
            }
    });
}

Var Tape::dropout(Var a, double p, bool train, std::mt19937_64& rng) {
    check(a, "dropout");
    if (p < 0.0 || p >= 1.0)
        throw ConfigError("dropout probability must lie in [0, 1), got " + std::to_string(p));
    if (!train || p == 0.0) {
        // identity pass-through keeps the tape structure uniform
        return scale(a, 1.0);
    }
    const Tensor& ta = val(a.id);
    Tensor mask(ta.shape());
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const double keep = 1.0 - p;
    for (std::size_t i = 0; i < mask.size(); ++i) mask[i] = unit(rng) < keep ? 1.0 / keep : 0.0;
    Tensor out = ta;
    for (std::size_t i = 0; i < out.size(); ++i) out[i] *= mask[i];
    return push(std::move(out), nodes_[a.id].needs_grad, [a, mask = std::move(mask)](Tape& t, std::uint32_t self) {
        const Tensor& g = t.grads_[self];
        Tensor& ga = t.grad_ref(a.id);
        for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i] * mask[i];
    });
}

Var Tape::sum_all(Var a) {
    check(a, "sum_all");
    const Tensor& ta = val(a.id);
    double acc = 0.0;
    for (std::size_t i = 0; i < ta.size(); ++i) acc += ta[i];
    return push(Tensor::scalar(acc), nodes_[a.id].needs_grad, [a](Tape& t, std::uint32_t self) {
        double g = t.grads_[self][0];
        Tensor& ga = t.grad_ref(a.id);
        for (std::size_t i = 0; i < ga.size(); ++i) ga[i] += g;
    });
}

Var Tape::mean_all(Var a) {
    check(a, "mean_all");
    const std::size_t n = val(a.id).size();
    require(n > 0, "mean_all", "empty tensor");
    return scale(sum_all(a), 1.0 / static_cast<double>(n));
}

Var Tape::bce_loss(Var scores, std::vector<double> labels) {
    check(scores, "bce_loss");
    const Tensor& ts = val(scores.id);
    require(ts.size() == labels.size(), "bce_loss",
            ts.shape_str() + " vs " + std::to_string(labels.size()) + " labels");
    require(!labels.empty(), "bce_loss", "empty batch");
    constexpr double eps = 1e-12;
    const std::size_t n = labels.size();
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double s = std::clamp(ts[i], eps, 1.0 - eps);
        acc += -(labels[i] * std::log(s) + (1.0 - labels[i]) * std::log(1.0 - s));
    }
    return push(Tensor::scalar(acc / static_cast<double>(n)), nodes_[scores.id].needs_grad,
                [scores, labels = std::move(labels)](Tape& t, std::uint32_t self) {
                    double g = t.grads_[self][0];
                    const Tensor& ts = t.val(scores.id);
                    Tensor& gs = t.grad_ref(scores.id);
                    const std::size_t n = labels.size();
                    for (std::size_t i = 0; i < n; ++i) {
                        if (ts[i] <= eps || ts[i] >= 1.0 - eps) continue;  // clamped region
                        gs[i] += g * (-labels[i] / ts[i] + (1.0 - labels[i]) / (1.0 - ts[i])) /
                                 static_cast<double>(n);
                    }
                });
}

void Tape::backward(Var scalar_loss) {
    check(scalar_loss, "backward");
    if (ran_backward_) throw RuntimeError("backward() ran already on this tape");
    if (nodes_.empty()) throw RuntimeError("backward() on an empty tape");
    if (val(scalar_loss.id).size() != 1)
        throw RuntimeError("backward() requires a scalar loss, got " +
                           val(scalar_loss.id).shape_str());

    grads_.clear();
    grads_.reserve(nodes_.size());
    for (const Node& n : nodes_) grads_.emplace_back(n.value.shape());
    grads_[scalar_loss.id][0] = 1.0;
    ran_backward_ = true;

    for (std::size_t i = nodes_.size(); i-- > 0;) {
        if (!nodes_[i].backprop || !nodes_[i].needs_grad) continue;
        nodes_[i].backprop(*this, static_cast<std::uint32_t>(i));
    }
}

FiniteDiffReport finite_diff_check(
    const std::function<double(std::span<const Tensor>)>& value_fn,
    const std::function<std::vector<Tensor>(std::span<const Tensor>)>& grad_fn,
    std::vector<Tensor> params, const std::vector<std::string>& names, double tolerance,
    double step) {
    if (names.size() != params.size())
        throw ConfigError("finite_diff_check: one name per parameter tensor required");

    auto analytic = grad_fn(params);
    if (analytic.size() != params.size())
        throw RuntimeError("finite_diff_check: gradient count mismatch");

    FiniteDiffReport report;
    for (std::size_t p = 0; p < params.size(); ++p) {
        double worst = 0.0;
        for (std::size_t i = 0; i < params[p].size(); ++i) {
            double saved = params[p][i];
            params[p][i] = saved + step;
            double up = value_fn(params);
            params[p][i] = saved - step;
            double down = value_fn(params);
            params[p][i] = saved;
            double numeric = (up - down) / (2.0 * step);
            double a = analytic[p][i];
            double rel = std::abs(a - numeric) /
                         std::max({std::abs(a), std::abs(numeric), 1e-3});
            worst = std::max(worst, rel);
        }
        report.entries.push_back({names[p], worst});
        report.worst = std::max(report.worst, worst);
    }
    report.passed = report.worst < tolerance;
    return report;
}

}  // namespace rest
