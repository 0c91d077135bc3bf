#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <vector>

#include "rest/tensor.hpp"

namespace rest {

// Handle into a Tape; cheap to copy, only meaningful for the tape that made it.
struct Var {
    std::uint32_t id = UINT32_MAX;
    bool valid() const noexcept { return id != UINT32_MAX; }
};

// Reverse-mode tape over the primitive set the model needs. A tape is
// confined to one thread; independent tapes may run concurrently. Gradients
// accumulate by sum over all uses; max/min ties route to the first attaining
// element.
class Tape {
public:
    Tape() = default;
    Tape(const Tape&) = delete;
    Tape& operator=(const Tape&) = delete;

    Var leaf(const Tensor& value);    // gradient-requiring input
    Var constant(Tensor value);       // tracked value, no gradient

    const Tensor& value(Var v) const;
    const Tensor& grad(Var v) const;  // valid after backward()

    Var add(Var a, Var b);
    Var sub(Var a, Var b);
    Var hadamard(Var a, Var b);
    Var scale(Var a, double c);
    Var matmul(Var a, Var b);                       // [m,k] x [k,n] -> [m,n]
    // x [n,in] -> x * w^T + bias, w [out,in], bias [out] or invalid for none
    Var linear(Var x, Var w, Var bias = {});
    Var sigmoid(Var a);
    Var tanh(Var a);
    Var concat_cols(std::span<const Var> parts);
    Var slice_cols(Var a, std::size_t from, std::size_t to);
    Var gather_rows(Var a, std::vector<std::uint32_t> idx);
    Var scatter_add_rows(Var a, std::vector<std::uint32_t> idx, std::size_t out_rows);
    Var segment_mean(Var m, std::vector<std::uint32_t> seg, std::size_t groups);
    Var segment_max(Var m, std::vector<std::uint32_t> seg, std::size_t groups);
    Var segment_min(Var m, std::vector<std::uint32_t> seg, std::size_t groups);
    Var segment_std(Var m, std::vector<std::uint32_t> seg, std::size_t groups);
    // Inverted scaling: train-time activations already carry 1/(1-p).
    Var dropout(Var a, double p, bool train, std::mt19937_64& rng);
    Var sum_all(Var a);   // scalar
    Var mean_all(Var a);  // scalar
    // Mean binary cross entropy against constant labels; scores clamped at 1e-12.
    Var bce_loss(Var scores, std::vector<double> labels);

    void backward(Var scalar_loss);

private:
    struct Node {
        Tensor value;
        bool needs_grad = false;
        std::function<void(Tape&, std::uint32_t)> backprop;  // (tape, own id)
    };

    Var push(Tensor value, bool needs_grad, std::function<void(Tape&, std::uint32_t)> backprop);
    Tensor& grad_ref(std::uint32_t id) { return grads_[id]; }
    const Tensor& val(std::uint32_t id) const { return nodes_[id].value; }
    void check(Var v, const char* op) const;

    std::vector<Node> nodes_;
    std::vector<Tensor> grads_;
    bool ran_backward_ = false;
};

struct FiniteDiffEntry {
    std::string name;
    double max_rel_err = 0.0;
};

struct FiniteDiffReport {
    std::vector<FiniteDiffEntry> entries;
    double worst = 0.0;
    bool passed = false;
};

// Central-difference check of grad_fn against value_fn, per parameter tensor.
// Relative error uses max(|analytic|, |numeric|, 1e-3) as the denominator so
// near-zero gradients compare absolutely.
FiniteDiffReport finite_diff_check(
    const std::function<double(std::span<const Tensor>)>& value_fn,
    const std::function<std::vector<Tensor>(std::span<const Tensor>)>& grad_fn,
    std::vector<Tensor> params, const std::vector<std::string>& names, double tolerance,
    double step = 1e-5);

}  // namespace rest
