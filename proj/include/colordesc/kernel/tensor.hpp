// Copyright (c) 2026, The colordesc Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <functional>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace colordesc {

/// Dense row-major array. T is float for training/inference and double for
/// gradient verification.
template <typename T>
class Tensor {
public:
    Tensor() = default;

    explicit Tensor(std::vector<std::size_t> shape, T fill = T{})
        : shape_(std::move(shape)), data_(count(shape_), fill) {}

    [[nodiscard]] const std::vector<std::size_t>& shape() const { return shape_; }
    [[nodiscard]] std::size_t rank() const { return shape_.size(); }
    [[nodiscard]] std::size_t dim(std::size_t i) const { return shape_.at(i); }
    [[nodiscard]] std::size_t size() const { return data_.size(); }
    [[nodiscard]] bool empty() const { return data_.empty(); }

    [[nodiscard]] std::size_t rows() const { return shape_.empty() ? 0 : shape_[0]; }
    [[nodiscard]] std::size_t cols() const { return shape_.size() < 2 ? 1 : shape_[1]; }

    T* data() { return data_.data(); }
    const T* data() const { return data_.data(); }
    std::span<T> values() { return data_; }
    std::span<const T> values() const { return data_; }

    T& operator[](std::size_t i) { return data_[i]; }
    const T& operator[](std::size_t i) const { return data_[i]; }

    T& at(std::size_t r, std::size_t c) { return data_[r * cols() + c]; }
    const T& at(std::size_t r, std::size_t c) const { return data_[r * cols() + c]; }

    std::span<T> row(std::size_t r) { return {data_.data() + r * cols(), cols()}; }
    std::span<const T> row(std::size_t r) const { return {data_.data() + r * cols(), cols()}; }

    void fill(T value) { std::fill(data_.begin(), data_.end(), value); }

    template <typename U>
    [[nodiscard]] Tensor<U> cast() const {
        Tensor<U> out(shape_);
        for (std::size_t i = 0; i < data_.size(); ++i) out[i] = static_cast<U>(data_[i]);
        return out;
    }

    friend bool operator==(const Tensor&, const Tensor&) = default;

private:
    static std::size_t count(const std::vector<std::size_t>& shape) {
        return std::accumulate(shape.begin(), shape.end(), std::size_t{1}, std::multiplies<>());
    }

    std::vector<std::size_t> shape_;
    std::vector<T> data_;
};

template <typename T>
struct NamedTensor {
    std::string name;
    Tensor<T>* tensor;
};

template <typename T>
struct ConstNamedTensor {
    std::string name;
    const Tensor<T>* tensor;
};

inline std::string shape_string(const std::vector<std::size_t>& shape) {
    std::string s = "[";
    for (std::size_t i = 0; i < shape.size(); ++i) {
        if (i > 0) s += "x";
        s += std::to_string(shape[i]);
    }
    return s + "]";
}

}  // namespace colordesc
