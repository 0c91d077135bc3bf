#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "rest/errors.hpp"

namespace rest {

// Dense row-major tensor of doubles. Rank 1 and 2 cover everything the model
// needs; scalars are size-1 rank-1 tensors.
class Tensor {
public:
    Tensor() = default;
    explicit Tensor(std::vector<std::size_t> shape);
    Tensor(std::vector<std::size_t> shape, std::vector<double> data);

    static Tensor zeros(std::vector<std::size_t> shape) { return Tensor(std::move(shape)); }
    static Tensor scalar(double v) { return Tensor({1}, {v}); }

    const std::vector<std::size_t>& shape() const noexcept { return shape_; }
    std::size_t rank() const noexcept { return shape_.size(); }
    std::size_t size() const noexcept { return data_.size(); }
    bool same_shape(const Tensor& other) const { return shape_ == other.shape_; }

    std::size_t rows() const;
    std::size_t cols() const;

    double* data() noexcept { return data_.data(); }
    const double* data() const noexcept { return data_.data(); }
    double& operator[](std::size_t i) { return data_[i]; }
    double operator[](std::size_t i) const { return data_[i]; }
    double& at(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    double at(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    bool all_finite() const;
    std::string shape_str() const;

    friend bool operator==(const Tensor&, const Tensor&) = default;

private:
    std::vector<std::size_t> shape_;
    std::size_t cols_ = 0;  // cached for at()
    std::vector<double> data_;
};

}  // namespace rest
