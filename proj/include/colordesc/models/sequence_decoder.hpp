// Copyright (c) 2026, The colordesc Authors
// SPDX-License-Identifier: Apache-2.0
//
// LSTM sequence decoder conditioned on color features.
//
// every-step conditioning: x_t = [f ; E(d_t)], h_0 = c_0 = 0
// init-state conditioning: x_t = E(d_t), h_0 = tanh(A_h f + a_h), c_0 = A_c f + a_c
//
// p(d_{t+1} | d_<=t, c) = softmax(W_out dropout(h_t) + b_out)
#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "colordesc/corpus.hpp"
#include "colordesc/features.hpp"
#include "colordesc/kernel/layers.hpp"
#include "colordesc/kernel/rng.hpp"
#include "colordesc/kernel/tensor.hpp"
#include "colordesc/models/model.hpp"

namespace colordesc {

enum class Conditioning { every_step, init_state };

std::string to_string(Conditioning mode);
Conditioning parse_conditioning(std::string_view name);

struct SequenceConfig {
    FeatureScheme features{FeatureScheme::fourier};
    Conditioning conditioning{Conditioning::every_step};
    int hidden{20};
    int embedding_dim{20};
    int bucket_embedding_dim{10};

    [[nodiscard]] int feature_dim() const {
        return colordesc::feature_dim(features, bucket_embedding_dim);
    }
    [[nodiscard]] int lstm_input_dim() const {
        return conditioning == Conditioning::every_step ? feature_dim() + embedding_dim
                                                        : embedding_dim;
    }
};

/// Initialization constants shared by the neural families.
struct InitConfig {
    double embedding_sigma{0.01};
    double lstm_sigma{0.1};
    double forget_bias{5.0};
};

template <typename T>
struct SequenceParams {
    Tensor<T> token_embedding;  // V x E
    Tensor<T> bucket_coarse;    // 9000 x B (bucket scheme only)
    Tensor<T> bucket_mid;       // 1125 x B
    Tensor<T> bucket_global;    // 1 x B
    Tensor<T> init_weight;      // 2H x F (init-state only)
    Tensor<T> init_bias;        // 2H
    LstmParams<T> lstm;
    Tensor<T> out_weight;  // V x H
    Tensor<T> out_bias;    // V

    SequenceParams() = default;
    SequenceParams(const SequenceConfig& cfg, int vocab_size);

    /// Nonempty tensors in a fixed order; names are the checkpoint keys.
    std::vector<NamedTensor<T>> named();
    [[nodiscard]] std::vector<ConstNamedTensor<T>> named() const;
    [[nodiscard]] std::int64_t size() const;
};

template <typename T>
class SequenceDecoder final : public ConditionalModel {
public:
    using State = LstmState<T>;

    SequenceDecoder(SequenceConfig config, Vocabulary vocab);

    /// Embeddings ~ N(0, embedding_sigma^2), LSTM weights and peepholes ~ N(0, lstm_sigma^2),
    /// forget bias = forget_bias, other biases 0, dense weights Glorot-uniform.
    void initialize(const InitConfig& init, Rng& rng);

    [[nodiscard]] const SequenceConfig& config() const { return config_; }
    [[nodiscard]] const Vocabulary& vocab() const { return vocab_; }
    SequenceParams<T>& params() { return params_; }
    [[nodiscard]] const SequenceParams<T>& params() const { return params_; }

    /// The dense feature block f (bucket embeddings are looked up here).
    [[nodiscard]] std::vector<T> feature_block(const ColorHSV& c) const;
    [[nodiscard]] State initial_state(std::span<const T> f) const;
    /// Log-probabilities of the next token; advances `state`.
    [[nodiscard]] std::vector<double> step_log_probs(std::span<const T> f, State& state,
                                                     int prev_token) const;

    /// Sum of log p over d_1..d_n and </s>. ids must start with <s> and end with </s>.
    [[nodiscard]] double score_ids(const ColorHSV& c, std::span<const int> ids) const;

    /// Teacher-forced forward/backward for one encoded description. Adds
    /// weight * d(-log p)/d(theta) into grad and returns the unweighted NLL (nats).
    /// Dropout is applied to the LSTM output when dropout_rng is non-null.
    /// Ids after the first </s> are treated as padding.
    double accumulate_gradient(const ColorHSV& c, std::span<const int> ids,
                               SequenceParams<T>& grad, T weight, Rng* dropout_rng,
                               double dropout_rate) const;

    // ConditionalModel
    [[nodiscard]] ModelFamily family() const override { return ModelFamily::rnn; }
    [[nodiscard]] FeatureScheme features() const override { return config_.features; }
    [[nodiscard]] double log_prob(const ColorHSV& c,
                                  std::span<const std::string> tokens) const override;
    [[nodiscard]] std::vector<std::string> top1(const ColorHSV& c,
                                                int beam_width = kDefaultBeamWidth) const override;
    [[nodiscard]] std::vector<std::string> sample(const ColorHSV& c, Rng& rng,
                                                  int max_len = kDefaultMaxLength) const override;
    [[nodiscard]] std::int64_t parameter_count() const override { return params_.size(); }
    void check_encodable(std::span<const std::string> tokens) const override;

    /// Beam search result as token ids (<s> ... </s>) with its log-probability.
    [[nodiscard]] std::vector<int> top1_ids(const ColorHSV& c, int beam_width,
                                            int max_len = kDefaultMaxLength,
                                            double* log_prob = nullptr) const;

private:
    void embed_step_input(std::span<const T> f, int token, std::vector<T>& x) const;

    SequenceConfig config_;
    Vocabulary vocab_;
    SequenceParams<T> params_;
};

extern template struct SequenceParams<float>;
extern template struct SequenceParams<double>;
extern template class SequenceDecoder<float>;
extern template class SequenceDecoder<double>;

using SequenceDecoderModel = SequenceDecoder<float>;

}  // namespace colordesc
