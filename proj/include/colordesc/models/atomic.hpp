// Copyright (c) 2026, The colordesc Authors
// SPDX-License-Identifier: Apache-2.0
//
// Feed-forward baseline that treats each full description as one class:
//   h1 = relu(W1 f + b1), h2 = W2 dropout(h1) + b2, p = softmax(W3 dropout(h2) + b3)
#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "colordesc/corpus.hpp"
#include "colordesc/features.hpp"
#include "colordesc/kernel/rng.hpp"
#include "colordesc/kernel/tensor.hpp"
#include "colordesc/models/model.hpp"

namespace colordesc {

struct AtomicConfig {
    FeatureScheme features{FeatureScheme::fourier};
    int hidden1{20};
    int hidden2{20};
    int bucket_embedding_dim{10};

    [[nodiscard]] int feature_dim() const {
        return colordesc::feature_dim(features, bucket_embedding_dim);
    }
};

/// Distinct normalized descriptions, ordered by descending training count then lexicographically.
class DescriptionInventory {
public:
    DescriptionInventory() = default;
    static DescriptionInventory build(const Dataset& train);
    static DescriptionInventory from_list(std::vector<std::string> descriptions);

    [[nodiscard]] int size() const { return static_cast<int>(items_.size()); }
    [[nodiscard]] const std::string& at(int i) const { return items_.at(static_cast<std::size_t>(i)); }
    /// Index of a normalized description, or -1.
    [[nodiscard]] int find(const std::string& normalized) const;
    [[nodiscard]] const std::vector<std::string>& items() const { return items_; }

private:
    std::vector<std::string> items_;
    std::unordered_map<std::string, int> index_;
};

template <typename T>
struct AtomicParams {
    Tensor<T> bucket_coarse, bucket_mid, bucket_global;
    Tensor<T> w1, b1, w2, b2, w3, b3;

    AtomicParams() = default;
    AtomicParams(const AtomicConfig& cfg, int classes);

    std::vector<NamedTensor<T>> named();
    [[nodiscard]] std::vector<ConstNamedTensor<T>> named() const;
    [[nodiscard]] std::int64_t size() const;
};

template <typename T>
class AtomicModel final : public ConditionalModel {
public:
    AtomicModel(AtomicConfig config, DescriptionInventory inventory);

    /// Bucket embeddings ~ N(0, embedding_sigma^2); dense weights Glorot-uniform; biases 0.
    void initialize(double embedding_sigma, Rng& rng);

    [[nodiscard]] const AtomicConfig& config() const { return config_; }
    [[nodiscard]] const DescriptionInventory& inventory() const { return inventory_; }
    AtomicParams<T>& params() { return params_; }
    [[nodiscard]] const AtomicParams<T>& params() const { return params_; }

    [[nodiscard]] std::vector<T> feature_block(const ColorHSV& c) const;
    /// Log-probabilities over the inventory (dropout off).
    [[nodiscard]] std::vector<double> class_log_probs(const ColorHSV& c) const;

    /// Adds weight * d(-log p[cls])/d(theta) into grad; returns the unweighted NLL.
    double accumulate_gradient(const ColorHSV& c, int cls, AtomicParams<T>& grad, T weight,
                               Rng* dropout_rng, double dropout_rate) const;

    [[nodiscard]] ModelFamily family() const override { return ModelFamily::atomic; }
    [[nodiscard]] FeatureScheme features() const override { return config_.features; }
    [[nodiscard]] double log_prob(const ColorHSV& c,
                                  std::span<const std::string> tokens) const override;
    [[nodiscard]] std::vector<std::string> top1(const ColorHSV& c,
                                                int beam_width = kDefaultBeamWidth) const override;
    [[nodiscard]] std::vector<std::string> sample(const ColorHSV& c, Rng& rng,
                                                  int max_len = kDefaultMaxLength) const override;
    [[nodiscard]] std::int64_t parameter_count() const override { return params_.size(); }
    void check_encodable(std::span<const std::string> tokens) const override;

private:
    AtomicConfig config_;
    DescriptionInventory inventory_;
    AtomicParams<T> params_;
};

extern template struct AtomicParams<float>;
extern template struct AtomicParams<double>;
extern template class AtomicModel<float>;
extern template class AtomicModel<double>;

}  // namespace colordesc
