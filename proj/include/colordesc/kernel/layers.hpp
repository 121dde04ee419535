// Copyright (c) 2026, The colordesc Authors
// SPDX-License-Identifier: Apache-2.0
//
// Forward and backward passes for the handful of layers the models need:
// dense, softmax/cross-entropy, inverted dropout, and a peephole LSTM cell.
#pragma once

#include <algorithm>
#include <cassert>
#include <cmath>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "colordesc/kernel/rng.hpp"
#include "colordesc/kernel/tensor.hpp"

namespace colordesc {

class ShapeError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

template <typename T>
T sigmoid(T x) {
    return T{1} / (T{1} + std::exp(-x));
}

// y += W x, W is (rows x cols)
template <typename T>
void matvec_add(const Tensor<T>& w, std::span<const T> x, std::span<T> y) {
    const std::size_t rows = w.rows();
    const std::size_t cols = w.cols();
    if (x.size() != cols || y.size() != rows) {
        throw ShapeError("matvec: weight " + shape_string(w.shape()) + " vs x " +
                         std::to_string(x.size()) + ", y " + std::to_string(y.size()));
    }
    const T* wp = w.data();
    for (std::size_t r = 0; r < rows; ++r) {
        T acc{0};
        const T* wr = wp + r * cols;
        for (std::size_t c = 0; c < cols; ++c) acc += wr[c] * x[c];
        y[r] += acc;
    }
}

// dx += W^T dy
template <typename T>
void matvec_transpose_add(const Tensor<T>& w, std::span<const T> dy, std::span<T> dx) {
    const std::size_t rows = w.rows();
    const std::size_t cols = w.cols();
    assert(dy.size() == rows && dx.size() == cols);
    const T* wp = w.data();
    for (std::size_t r = 0; r < rows; ++r) {
        const T g = dy[r];
        if (g == T{0}) continue;
        const T* wr = wp + r * cols;
        for (std::size_t c = 0; c < cols; ++c) dx[c] += g * wr[c];
    }
}

// dW += dy x^T
template <typename T>
void outer_add(Tensor<T>& dw, std::span<const T> dy, std::span<const T> x) {
    const std::size_t cols = dw.cols();
    assert(dy.size() == dw.rows() && x.size() == cols);
    T* dp = dw.data();
    for (std::size_t r = 0; r < dy.size(); ++r) {
        const T g = dy[r];
        if (g == T{0}) continue;
        T* dr = dp + r * cols;
        for (std::size_t c = 0; c < cols; ++c) dr[c] += g * x[c];
    }
}

/// W x + b.
template <typename T>
std::vector<T> dense_forward(const Tensor<T>& w, const Tensor<T>& b, std::span<const T> x) {
    if (b.size() != w.rows()) {
        throw ShapeError("dense: bias " + shape_string(b.shape()) + " vs weight " +
                         shape_string(w.shape()));
    }
    std::vector<T> y(b.values().begin(), b.values().end());
    matvec_add<T>(w, x, y);
    return y;
}

template <typename T>
std::vector<T> log_softmax(std::span<const T> z) {
    if (z.empty()) throw ShapeError("softmax of empty vector");
    const T m = *std::max_element(z.begin(), z.end());
    T sum{0};
    for (const T v : z) sum += std::exp(v - m);
    const T lse = m + std::log(sum);
    std::vector<T> out(z.size());
    for (std::size_t i = 0; i < z.size(); ++i) out[i] = z[i] - lse;
    return out;
}

template <typename T>
std::vector<T> softmax(std::span<const T> z) {
    if (z.empty()) throw ShapeError("softmax of empty vector");
    const T m = *std::max_element(z.begin(), z.end());
    std::vector<T> out(z.size());
    T sum{0};
    for (std::size_t i = 0; i < z.size(); ++i) {
        out[i] = std::exp(z[i] - m);
        sum += out[i];
    }
    for (auto& p : out) p /= sum;
    return out;
}

/// -log p[target].
template <typename T>
T cross_entropy(std::span<const T> p, int target) {
    if (target < 0 || static_cast<std::size_t>(target) >= p.size()) {
        throw ShapeError("cross_entropy: target " + std::to_string(target) + " outside " +
                         std::to_string(p.size()) + " classes");
    }
    return -std::log(p[static_cast<std::size_t>(target)]);
}

/// Inverted dropout in place. In training mode each unit is zeroed with
/// probability `rate` and survivors are scaled by 1/(1-rate). Returns the
/// applied multiplier per unit (all ones at inference).
template <typename T>
std::vector<T> dropout_apply(std::span<T> x, double rate, Rng& rng, bool training) {
    if (!(rate >= 0.0 && rate < 1.0)) {
        throw std::invalid_argument("dropout rate must be in [0,1)");
    }
    std::vector<T> mask(x.size(), T{1});
    if (!training || rate == 0.0) return mask;
    const T scale = static_cast<T>(1.0 / (1.0 - rate));
    for (std::size_t i = 0; i < x.size(); ++i) {
        mask[i] = rng.uniform() < rate ? T{0} : scale;
        x[i] *= mask[i];
    }
    return mask;
}

/// Peephole LSTM (Graves 2013). Gate blocks are stacked in the order
/// input, forget, candidate, output:
///   w_x  (4H x input_dim), w_h (4H x H), bias (4H),
///   peephole (3 x H) rows = input, forget, output.
template <typename T>
struct LstmParams {
    Tensor<T> w_x;
    Tensor<T> w_h;
    Tensor<T> peephole;
    Tensor<T> bias;

    LstmParams() = default;
    LstmParams(std::size_t input_dim, std::size_t hidden)
        : w_x({4 * hidden, input_dim}),
          w_h({4 * hidden, hidden}),
          peephole({3, hidden}),
          bias({4 * hidden}) {}

    [[nodiscard]] std::size_t hidden() const { return w_h.cols(); }
    [[nodiscard]] std::size_t input_dim() const { return w_x.cols(); }

    /// Forget-gate slice of the bias.
    std::span<T> forget_bias() { return bias.values().subspan(hidden(), hidden()); }
};

template <typename T>
struct LstmState {
    std::vector<T> h;
    std::vector<T> c;
};

/// Everything the backward pass needs from one step.
template <typename T>
struct LstmCache {
    std::vector<T> x, h_prev, c_prev;
    std::vector<T> i, f, g, o, c, tanh_c, h;
};

template <typename T>
void lstm_step(const LstmParams<T>& p, std::span<const T> x, std::span<const T> h_prev,
               std::span<const T> c_prev, LstmCache<T>& cache) {
    const std::size_t H = p.hidden();
    if (x.size() != p.input_dim() || h_prev.size() != H || c_prev.size() != H) {
        throw ShapeError("lstm_step: x " + std::to_string(x.size()) + ", h " +
                         std::to_string(h_prev.size()) + ", c " + std::to_string(c_prev.size()) +
                         " vs input_dim " + std::to_string(p.input_dim()) + ", H " +
                         std::to_string(H));
    }
    cache.x.assign(x.begin(), x.end());
    cache.h_prev.assign(h_prev.begin(), h_prev.end());
    cache.c_prev.assign(c_prev.begin(), c_prev.end());

    std::vector<T> z(p.bias.values().begin(), p.bias.values().end());
    matvec_add<T>(p.w_x, x, z);
    matvec_add<T>(p.w_h, h_prev, z);

    const auto peep_i = p.peephole.row(0);
    const auto peep_f = p.peephole.row(1);
    const auto peep_o = p.peephole.row(2);
    cache.i.resize(H);
    cache.f.resize(H);
    cache.g.resize(H);
    cache.o.resize(H);
    cache.c.resize(H);
    cache.tanh_c.resize(H);
    cache.h.resize(H);
    for (std::size_t k = 0; k < H; ++k) {
        cache.i[k] = sigmoid(z[k] + peep_i[k] * c_prev[k]);
        cache.f[k] = sigmoid(z[H + k] + peep_f[k] * c_prev[k]);
        cache.g[k] = std::tanh(z[2 * H + k]);
        cache.c[k] = cache.f[k] * c_prev[k] + cache.i[k] * cache.g[k];
        cache.o[k] = sigmoid(z[3 * H + k] + peep_o[k] * cache.c[k]);
        cache.tanh_c[k] = std::tanh(cache.c[k]);
        cache.h[k] = cache.o[k] * cache.tanh_c[k];
    }
}

template <typename T>
LstmState<T> lstm_step(const LstmParams<T>& p, std::span<const T> x, std::span<const T> h_prev,
                       std::span<const T> c_prev) {
    LstmCache<T> cache;
    lstm_step(p, x, h_prev, c_prev, cache);
    return {std::move(cache.h), std::move(cache.c)};
}

/// Backpropagates one step. On entry dh is dL/dh_t and dc is dL/dc_t arriving
/// from later steps; on exit dc holds dL/dc_{t-1}. dx and dh_prev are accumulated into.
template <typename T>
void lstm_step_backward(const LstmParams<T>& p, const LstmCache<T>& cache, std::span<const T> dh,
                        std::vector<T>& dc, LstmParams<T>& grad, std::span<T> dx,
                        std::span<T> dh_prev) {
    const std::size_t H = p.hidden();
    const auto peep_i = p.peephole.row(0);
    const auto peep_f = p.peephole.row(1);
    const auto peep_o = p.peephole.row(2);
    auto gpeep_i = grad.peephole.row(0);
    auto gpeep_f = grad.peephole.row(1);
    auto gpeep_o = grad.peephole.row(2);

    std::vector<T> dz(4 * H);
    for (std::size_t k = 0; k < H; ++k) {
        const T o = cache.o[k];
        const T tc = cache.tanh_c[k];
        const T dzo = dh[k] * tc * o * (T{1} - o);
        T dck = dc[k] + dh[k] * o * (T{1} - tc * tc) + peep_o[k] * dzo;
        const T i = cache.i[k];
        const T f = cache.f[k];
        const T g = cache.g[k];
        const T cp = cache.c_prev[k];
        const T dzi = dck * g * i * (T{1} - i);
        const T dzf = dck * cp * f * (T{1} - f);
        const T dzg = dck * i * (T{1} - g * g);
        dz[k] = dzi;
        dz[H + k] = dzf;
        dz[2 * H + k] = dzg;
        dz[3 * H + k] = dzo;
        gpeep_i[k] += dzi * cp;
        gpeep_f[k] += dzf * cp;
        gpeep_o[k] += dzo * cache.c[k];
        dc[k] = dck * f + peep_i[k] * dzi + peep_f[k] * dzf;
    }
    for (std::size_t r = 0; r < 4 * H; ++r) grad.bias[r] += dz[r];
    outer_add<T>(grad.w_x, dz, cache.x);
    outer_add<T>(grad.w_h, dz, cache.h_prev);
    matvec_transpose_add<T>(p.w_x, dz, dx);
    matvec_transpose_add<T>(p.w_h, dz, dh_prev);
}

}  // namespace colordesc
