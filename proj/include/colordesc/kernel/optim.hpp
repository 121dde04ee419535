// Copyright (c) 2026, The colordesc Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>

#include "colordesc/kernel/rng.hpp"
#include "colordesc/kernel/tensor.hpp"

namespace colordesc {

inline constexpr double kAdagradEpsilon = 1e-8;

/// G += g^2; param -= lr * g / (sqrt(G) + eps). `accum` starts at zero and never decreases.
template <typename T>
void adagrad_update(Tensor<T>& param, const Tensor<T>& grad, Tensor<T>& accum, double lr,
                    double eps = kAdagradEpsilon) {
    if (param.size() != grad.size() || param.size() != accum.size()) {
        throw std::invalid_argument("adagrad_update: size mismatch");
    }
    for (std::size_t i = 0; i < param.size(); ++i) {
        const T g = grad[i];
        if (g == T{0}) continue;
        accum[i] += g * g;
        param[i] -= static_cast<T>(lr * g / (std::sqrt(static_cast<double>(accum[i])) + eps));
    }
}

template <typename T>
void init_normal(Tensor<T>& t, double sigma, Rng& rng) {
    for (auto& v : t.values()) v = static_cast<T>(rng.normal(0.0, sigma));
}

inline double glorot_limit(std::size_t fan_in, std::size_t fan_out) {
    return std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
}

/// Normalized uniform (Glorot) init for a (fan_out x fan_in) weight matrix.
template <typename T>
void init_glorot_uniform(Tensor<T>& w, Rng& rng) {
    const double limit = glorot_limit(w.cols(), w.rows());
    for (auto& v : w.values()) {
        // float rounding can push a draw just past the limit
        v = static_cast<T>(rng.uniform(-limit, limit));
        if (std::abs(static_cast<double>(v)) > limit) v = static_cast<T>(0);
    }
}

}  // namespace colordesc
