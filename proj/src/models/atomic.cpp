// Copyright (c) 2026, The colordesc Authors
// SPDX-License-Identifier: Apache-2.0
#include "colordesc/models/atomic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "colordesc/errors.hpp"
#include "colordesc/kernel/layers.hpp"
#include "colordesc/kernel/optim.hpp"

namespace colordesc {

DescriptionInventory DescriptionInventory::build(const Dataset& train) {
    std::map<std::string, std::size_t> counts;
    for (const auto& ex : train.items) ++counts[ex.description.normalized()];
    std::vector<std::pair<std::string, std::size_t>> ranked(counts.begin(), counts.end());
    std::stable_sort(ranked.begin(), ranked.end(),
                     [](const auto& a, const auto& b) { return a.second > b.second; });
    std::vector<std::string> items;
    items.reserve(ranked.size());
    for (auto& [d, n] : ranked) items.push_back(d);
    return from_list(std::move(items));
}

DescriptionInventory DescriptionInventory::from_list(std::vector<std::string> descriptions) {
    DescriptionInventory inv;
    inv.items_ = std::move(descriptions);
    for (std::size_t i = 0; i < inv.items_.size(); ++i) {
        if (!inv.index_.emplace(inv.items_[i], static_cast<int>(i)).second) {
            throw FormatError("duplicate description in inventory: '" + inv.items_[i] + "'");
        }
    }
    return inv;
}

int DescriptionInventory::find(const std::string& normalized) const {
    const auto it = index_.find(normalized);
    return it == index_.end() ? -1 : it->second;
}

template <typename T>
AtomicParams<T>::AtomicParams(const AtomicConfig& cfg, int classes) {
    if (cfg.hidden1 < 1 || cfg.hidden2 < 1 || cfg.bucket_embedding_dim < 1 || classes < 1) {
        throw UsageError("atomic model sizes must be >= 1 and the inventory nonempty");
    }
    const auto F = static_cast<std::size_t>(cfg.feature_dim());
    const auto H1 = static_cast<std::size_t>(cfg.hidden1);
    const auto H2 = static_cast<std::size_t>(cfg.hidden2);
    const auto C = static_cast<std::size_t>(classes);
    if (cfg.features == FeatureScheme::buckets) {
        const auto B = static_cast<std::size_t>(cfg.bucket_embedding_dim);
        bucket_coarse = Tensor<T>({static_cast<std::size_t>(kCoarseGrid.size()), B});
        bucket_mid = Tensor<T>({static_cast<std::size_t>(kMidGrid.size()), B});
        bucket_global = Tensor<T>({static_cast<std::size_t>(kGlobalGrid.size()), B});
    }
    w1 = Tensor<T>({H1, F});
    b1 = Tensor<T>({H1});
    w2 = Tensor<T>({H2, H1});
    b2 = Tensor<T>({H2});
    w3 = Tensor<T>({C, H2});
    b3 = Tensor<T>({C});
}

template <typename T>
std::vector<NamedTensor<T>> AtomicParams<T>::named() {
    std::vector<NamedTensor<T>> all{
        {"bucket_coarse", &bucket_coarse}, {"bucket_mid", &bucket_mid},
        {"bucket_global", &bucket_global}, {"w1", &w1},
        {"b1", &b1},                       {"w2", &w2},
        {"b2", &b2},                       {"w3", &w3},
        {"b3", &b3},
    };
    std::erase_if(all, [](const auto& nt) { return nt.tensor->empty(); });
    return all;
}

template <typename T>
std::vector<ConstNamedTensor<T>> AtomicParams<T>::named() const {
    std::vector<ConstNamedTensor<T>> out;
    for (const auto& nt : const_cast<AtomicParams*>(this)->named()) out.push_back({nt.name, nt.tensor});
    return out;
}

template <typename T>
std::int64_t AtomicParams<T>::size() const {
    std::int64_t n = 0;
    for (const auto& nt : named()) n += static_cast<std::int64_t>(nt.tensor->size());
    return n;
}

template <typename T>
AtomicModel<T>::AtomicModel(AtomicConfig config, DescriptionInventory inventory)
    : config_(config), inventory_(std::move(inventory)), params_(config_, inventory_.size()) {}

template <typename T>
void AtomicModel<T>::initialize(double embedding_sigma, Rng& rng) {
    init_normal(params_.bucket_coarse, embedding_sigma, rng);
    init_normal(params_.bucket_mid, embedding_sigma, rng);
    init_normal(params_.bucket_global, embedding_sigma, rng);
    init_glorot_uniform(params_.w1, rng);
    init_glorot_uniform(params_.w2, rng);
    init_glorot_uniform(params_.w3, rng);
    params_.b1.fill(T{0});
    params_.b2.fill(T{0});
    params_.b3.fill(T{0});
}

template <typename T>
std::vector<T> AtomicModel<T>::feature_block(const ColorHSV& c) const {
    const FeatureVector fv = featurize(config_.features, c);
    if (config_.features != FeatureScheme::buckets) {
        return std::vector<T>(fv.values.begin(), fv.values.end());
    }
    std::vector<T> f;
    for (const auto row : {params_.bucket_coarse.row(static_cast<std::size_t>(fv.buckets.coarse)),
                           params_.bucket_mid.row(static_cast<std::size_t>(fv.buckets.mid)),
                           params_.bucket_global.row(static_cast<std::size_t>(fv.buckets.global))}) {
        f.insert(f.end(), row.begin(), row.end());
    }
    return f;
}

template <typename T>
std::vector<double> AtomicModel<T>::class_log_probs(const ColorHSV& c) const {
    const auto f = feature_block(c);
    auto h1 = dense_forward<T>(params_.w1, params_.b1, f);
    for (auto& v : h1) v = std::max(v, T{0});
    const auto h2 = dense_forward<T>(params_.w2, params_.b2, h1);
    const auto logits = dense_forward<T>(params_.w3, params_.b3, h2);
    const auto lp = log_softmax<T>(logits);
    return std::vector<double>(lp.begin(), lp.end());
}

template <typename T>
double AtomicModel<T>::accumulate_gradient(const ColorHSV& c, int cls, AtomicParams<T>& grad,
                                           T weight, Rng* dropout_rng, double dropout_rate) const {
    const auto& p = params_;
    const auto f = feature_block(c);
    const auto z1 = dense_forward<T>(p.w1, p.b1, f);
    std::vector<T> h1(z1.size());
    for (std::size_t k = 0; k < z1.size(); ++k) h1[k] = std::max(z1[k], T{0});
    std::vector<T> m1(h1.size(), T{1}), m2;
    if (dropout_rng != nullptr) m1 = dropout_apply<T>(h1, dropout_rate, *dropout_rng, true);
    auto h2 = dense_forward<T>(p.w2, p.b2, h1);
    m2.assign(h2.size(), T{1});
    if (dropout_rng != nullptr) m2 = dropout_apply<T>(h2, dropout_rate, *dropout_rng, true);
    const auto logits = dense_forward<T>(p.w3, p.b3, h2);
    const auto lp = log_softmax<T>(logits);
    const double loss = -static_cast<double>(lp[static_cast<std::size_t>(cls)]);
    if (!std::isfinite(loss)) throw NumericError("non-finite atomic loss");

    std::vector<T> d3(lp.size());
    for (std::size_t k = 0; k < lp.size(); ++k) d3[k] = std::exp(lp[k]);
    d3[static_cast<std::size_t>(cls)] -= T{1};
    for (auto& g : d3) g *= weight;
    for (std::size_t k = 0; k < d3.size(); ++k) grad.b3[k] += d3[k];
    outer_add<T>(grad.w3, d3, h2);
    std::vector<T> dh2(h2.size(), T{0});
    matvec_transpose_add<T>(p.w3, d3, dh2);
    for (std::size_t k = 0; k < dh2.size(); ++k) dh2[k] *= m2[k];
    for (std::size_t k = 0; k < dh2.size(); ++k) grad.b2[k] += dh2[k];
    outer_add<T>(grad.w2, dh2, h1);
    std::vector<T> dh1(h1.size(), T{0});
    matvec_transpose_add<T>(p.w2, dh2, dh1);
    for (std::size_t k = 0; k < dh1.size(); ++k) {
        dh1[k] *= m1[k] * (z1[k] > T{0} ? T{1} : T{0});
    }
    for (std::size_t k = 0; k < dh1.size(); ++k) grad.b1[k] += dh1[k];
    outer_add<T>(grad.w1, dh1, f);
    if (config_.features == FeatureScheme::buckets) {
        std::vector<T> df(f.size(), T{0});
        matvec_transpose_add<T>(p.w1, dh1, df);
        const auto b = bucket_index(c);
        const auto B = static_cast<std::size_t>(config_.bucket_embedding_dim);
        auto scatter = [&](Tensor<T>& table, int cell, std::size_t offset) {
            auto row = table.row(static_cast<std::size_t>(cell));
            for (std::size_t k = 0; k < B; ++k) row[k] += df[offset + k];
        };
        scatter(grad.bucket_coarse, b.coarse, 0);
        scatter(grad.bucket_mid, b.mid, B);
        scatter(grad.bucket_global, b.global, 2 * B);
    }
    return loss;
}

template <typename T>
double AtomicModel<T>::log_prob(const ColorHSV& c, std::span<const std::string> tokens) const {
    if (tokens.empty()) throw UsageError("empty description");
    const int cls = inventory_.find(join_tokens(tokens));
    if (cls < 0) return -std::numeric_limits<double>::infinity();
    return class_log_probs(c)[static_cast<std::size_t>(cls)];
}

template <typename T>
std::vector<std::string> AtomicModel<T>::top1(const ColorHSV& c, int /*beam_width*/) const {
    const auto lp = class_log_probs(c);
    const auto best = std::max_element(lp.begin(), lp.end()) - lp.begin();
    return tokenize(inventory_.at(static_cast<int>(best)));
}

template <typename T>
std::vector<std::string> AtomicModel<T>::sample(const ColorHSV& c, Rng& rng, int /*max_len*/) const {
    const auto lp = class_log_probs(c);
    const double r = rng.uniform();
    double acc = 0.0;
    std::size_t chosen = lp.size() - 1;
    for (std::size_t k = 0; k < lp.size(); ++k) {
        acc += std::exp(lp[k]);
        if (r < acc) {
            chosen = k;
            break;
        }
    }
    return tokenize(inventory_.at(static_cast<int>(chosen)));
}

template <typename T>
void AtomicModel<T>::check_encodable(std::span<const std::string> tokens) const {
    if (tokens.empty()) throw UsageError("empty description");
    if (inventory_.find(join_tokens(tokens)) < 0) {
        throw UsageError("description '" + join_tokens(tokens) +
                         "' is not in the atomic model's inventory");
    }
}

template struct AtomicParams<float>;
template struct AtomicParams<double>;
template class AtomicModel<float>;
template class AtomicModel<double>;

}  // namespace colordesc
