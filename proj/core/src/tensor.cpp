#include "rest/tensor.hpp"

#include <cmath>
#include <numeric>
#include <sstream>

namespace rest {

namespace {

std::size_t shape_product(const std::vector<std::size_t>& shape) {
    std::size_t n = 1;
    for (std::size_t d : shape) n *= d;
    return n;
}

}  // namespace

Tensor::Tensor(std::vector<std::size_t> shape)
    : shape_(std::move(shape)), data_(shape_product(shape_), 0.0) {
    cols_ = shape_.empty() ? 0 : shape_.back();
}

Tensor::Tensor(std::vector<std::size_t> shape, std::vector<double> data)
    : shape_(std::move(shape)), data_(std::move(data)) {
    if (data_.size() != shape_product(shape_))
        throw RuntimeError("tensor data length does not match shape " + shape_str());
    cols_ = shape_.empty() ? 0 : shape_.back();
}

std::size_t Tensor::rows() const {
    if (rank() != 2) throw RuntimeError("rows() on tensor of shape " + shape_str());
    return shape_[0];
}

std::size_t Tensor::cols() const {
    if (rank() != 2) throw RuntimeError("cols() on tensor of shape " + shape_str());
    return shape_[1];
}

bool Tensor::all_finite() const {
    for (double v : data_)
        if (!std::isfinite(v)) return false;
    return true;
}

std::string Tensor::shape_str() const {
    std::ostringstream out;
    out << '[';
    for (std::size_t i = 0; i < shape_.size(); ++i) {
        if (i) out << ',';
        out << shape_[i];
    }
    out << ']';
    return out.str();
}

}  // namespace rest
