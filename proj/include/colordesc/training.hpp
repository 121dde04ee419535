// Copyright (c) 2026, The colordesc Authors
// SPDX-License-Identifier: Apache-2.0
//
// Minibatch Adagrad training with teacher forcing, inverted dropout and
// dev-perplexity early stopping.
#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "json.hpp"

#include "colordesc/corpus.hpp"
#include "colordesc/models/atomic.hpp"
#include "colordesc/models/histogram.hpp"
#include "colordesc/models/model.hpp"
#include "colordesc/models/sequence_decoder.hpp"

namespace colordesc {

struct TrainingConfig {
    double learning_rate{0.1};
    double dropout{0.2};
    int hidden{20};
    int embedding_dim{20};
    int bucket_embedding_dim{10};
    double embedding_sigma{0.01};
    double lstm_sigma{0.1};
    double forget_bias{5.0};
    int batch_size{128};
    int max_epochs{10};
    /// Early stop after this many consecutive dev evaluations without improvement.
    int patience{2};
    int evals_per_epoch{2};
    std::uint64_t seed{1};
    Conditioning conditioning{Conditioning::every_step};
    double histogram_smoothing{1.0};

    /// Throws UsageError naming the first invalid field.
    void validate() const;
    [[nodiscard]] nlohmann::json to_json() const;
};

struct TrainingRecord {
    double epoch{0.0};
    std::string split;
    double perplexity{0.0};
    std::size_t items{0};
};

nlohmann::json to_json(const TrainingRecord& r);

using TrainingLogSink = std::function<void(const TrainingRecord&)>;

struct TrainingOutcome {
    std::vector<TrainingRecord> log;
    double epochs_trained{0.0};
    /// Best dev perplexity seen (0 when no dev set was given).
    double best_dev_perplexity{0.0};
};

SequenceDecoder<float> train_sequence(const Dataset& train, const Dataset* dev,
                                      FeatureScheme features, const TrainingConfig& config,
                                      TrainingOutcome* outcome = nullptr,
                                      const TrainingLogSink& sink = {});

AtomicModel<float> train_atomic(const Dataset& train, const Dataset* dev, FeatureScheme features,
                                const TrainingConfig& config, TrainingOutcome* outcome = nullptr,
                                const TrainingLogSink& sink = {});

HistogramModel train_histogram(const Dataset& train, const TrainingConfig& config);

struct TrainedModel {
    std::unique_ptr<ConditionalModel> model;
    TrainingOutcome outcome;
};

/// Dispatches on family. The histogram family only supports bucket features.
TrainedModel train_model(ModelFamily family, FeatureScheme features, const Dataset& train,
                         const Dataset* dev, const TrainingConfig& config,
                         const TrainingLogSink& sink = {});

}  // namespace colordesc
