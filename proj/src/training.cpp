// Copyright (c) 2026, The colordesc Authors
// SPDX-License-Identifier: Apache-2.0
#include "colordesc/training.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>

#include "colordesc/errors.hpp"
#include "colordesc/kernel/optim.hpp"
#include "colordesc/kernel/rng.hpp"

namespace colordesc {

void TrainingConfig::validate() const {
    auto fail = [](const std::string& key, const std::string& why) {
        throw UsageError("invalid config '" + key + "': " + why);
    };
    if (!(learning_rate > 0.0)) fail("lr", "must be > 0");
    if (!(dropout >= 0.0 && dropout < 1.0)) fail("dropout", "must be in [0,1)");
    if (hidden < 1) fail("hidden", "must be >= 1");
    if (embedding_dim < 1) fail("embedding-dim", "must be >= 1");
    if (bucket_embedding_dim < 1) fail("bucket-embedding-dim", "must be >= 1");
    if (!(embedding_sigma >= 0.0)) fail("embedding-sigma", "must be >= 0");
    if (!(lstm_sigma >= 0.0)) fail("lstm-sigma", "must be >= 0");
    if (!std::isfinite(forget_bias)) fail("forget-bias", "must be finite");
    if (batch_size < 1) fail("batch-size", "must be >= 1");
    if (max_epochs < 1) fail("epochs", "must be >= 1");
    if (patience < 1) fail("patience", "must be >= 1");
    if (evals_per_epoch < 1) fail("evals-per-epoch", "must be >= 1");
    if (!(histogram_smoothing > 0.0)) fail("hm-smoothing", "must be > 0");
}

nlohmann::json TrainingConfig::to_json() const {
    return {
        {"learning_rate", learning_rate},
        {"dropout", dropout},
        {"hidden", hidden},
        {"embedding_dim", embedding_dim},
        {"bucket_embedding_dim", bucket_embedding_dim},
        {"embedding_sigma", embedding_sigma},
        {"lstm_sigma", lstm_sigma},
        {"forget_bias", forget_bias},
        {"batch_size", batch_size},
        {"max_epochs", max_epochs},
        {"patience", patience},
        {"evals_per_epoch", evals_per_epoch},
        {"seed", seed},
        {"conditioning", to_string(conditioning)},
        {"histogram_smoothing", histogram_smoothing},
        {"adagrad_epsilon", kAdagradEpsilon},
        {"prng", std::string(kPrngId)},
    };
}

nlohmann::json to_json(const TrainingRecord& r) {
    return {{"epoch", r.epoch}, {"split", r.split}, {"perplexity", r.perplexity}, {"items", r.items}};
}

namespace {

/// Generic minibatch loop. `Adapter` supplies:
///   std::size_t size() const
///   double accumulate(std::size_t item, Grad& grad, float weight, Rng* rng)
///   double dev_perplexity() const            (NaN when there is no dev set)
///   params()/named() access for the optimizer
template <typename Model, typename Params, typename Adapter>
void run_training(Model& model, Adapter& adapter, const TrainingConfig& cfg,
                  TrainingOutcome& outcome, const TrainingLogSink& sink) {
    Rng root(cfg.seed);
    Rng shuffle_rng = root.split(1);
    Rng dropout_rng = root.split(2);

    auto zeros_like = [](const Params& p) {
        Params z = p;
        for (auto& nt : z.named()) nt.tensor->fill(0.0f);
        return z;
    };
    Params grad = zeros_like(model.params());
    Params accum = zeros_like(model.params());
    Params best = model.params();
    double best_dev = std::numeric_limits<double>::infinity();
    int stale = 0;

    const std::size_t n = adapter.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    const std::size_t bs = static_cast<std::size_t>(cfg.batch_size);
    const std::size_t batches = (n + bs - 1) / bs;
    const std::size_t eval_every =
        std::max<std::size_t>(1, (batches + static_cast<std::size_t>(cfg.evals_per_epoch) - 1) /
                                     static_cast<std::size_t>(cfg.evals_per_epoch));
    const bool has_dev = adapter.has_dev();

    auto emit = [&](TrainingRecord rec) {
        if (sink) sink(rec);
        outcome.log.push_back(std::move(rec));
    };

    double window_loss = 0.0;
    std::size_t window_items = 0;
    bool stop = false;
    for (int epoch = 0; epoch < cfg.max_epochs && !stop; ++epoch) {
        std::shuffle(order.begin(), order.end(), shuffle_rng.engine());
        for (std::size_t b = 0; b < batches && !stop; ++b) {
            const std::size_t lo = b * bs;
            const std::size_t hi = std::min(n, lo + bs);
            const float weight = 1.0f / static_cast<float>(hi - lo);
            double batch_loss = 0.0;
            for (std::size_t k = lo; k < hi; ++k) {
                Rng* rng = cfg.dropout > 0.0 ? &dropout_rng : nullptr;
                batch_loss += adapter.accumulate(order[k], grad, weight, rng);
            }
            if (!std::isfinite(batch_loss)) {
                throw NumericError("training diverged: non-finite loss in epoch " +
                                   std::to_string(epoch + 1) + ", batch " + std::to_string(b + 1));
            }
            auto params = model.params().named();
            auto grads = grad.named();
            auto accums = accum.named();
            for (std::size_t t = 0; t < params.size(); ++t) {
                adagrad_update(*params[t].tensor, *grads[t].tensor, *accums[t].tensor,
                               cfg.learning_rate);
                grads[t].tensor->fill(0.0f);
            }
            window_loss += batch_loss;
            window_items += hi - lo;

            const bool at_eval = (b + 1) % eval_every == 0 || b + 1 == batches;
            if (!at_eval) continue;
            const double epoch_pos =
                epoch + static_cast<double>(b + 1) / static_cast<double>(batches);
            emit({epoch_pos, "train", std::exp(window_loss / static_cast<double>(window_items)),
                  window_items});
            window_loss = 0.0;
            window_items = 0;
            outcome.epochs_trained = epoch_pos;
            if (!has_dev) continue;
            const auto [dev_ppl, dev_items] = adapter.dev_perplexity();
            if (!std::isfinite(dev_ppl)) {
                throw NumericError("training diverged: non-finite dev perplexity at epoch " +
                                   std::to_string(epoch_pos));
            }
            emit({epoch_pos, "dev", dev_ppl, dev_items});
            if (dev_ppl < best_dev) {
                best_dev = dev_ppl;
                best = model.params();
                stale = 0;
            } else if (++stale >= cfg.patience) {
                stop = true;
            }
        }
    }
    if (has_dev) {
        model.params() = std::move(best);
        outcome.best_dev_perplexity = best_dev;
    }
}

struct FlatSequences {
    std::vector<ColorHSV> colors;
    std::vector<int> tokens;
    std::vector<std::size_t> offsets{0};

    FlatSequences(const Dataset& data, const Vocabulary& vocab) {
        colors.reserve(data.size());
        for (const auto& ex : data.items) {
            colors.push_back(ex.color);
            const auto ids = vocab.encode(ex.description.tokens);
            tokens.insert(tokens.end(), ids.begin(), ids.end());
            offsets.push_back(tokens.size());
        }
    }
    [[nodiscard]] std::span<const int> ids(std::size_t i) const {
        return {tokens.data() + offsets[i], offsets[i + 1] - offsets[i]};
    }
};

class SequenceAdapter {
public:
    SequenceAdapter(SequenceDecoder<float>& model, const Dataset& train, const Dataset* dev,
                    double dropout)
        : model_(model), train_(train, model.vocab()), dropout_(dropout) {
        if (dev != nullptr && !dev->empty()) dev_.emplace(*dev, model.vocab());
    }

    [[nodiscard]] std::size_t size() const { return train_.colors.size(); }
    [[nodiscard]] bool has_dev() const { return dev_.has_value(); }

    double accumulate(std::size_t i, SequenceParams<float>& grad, float weight, Rng* rng) {
        return model_.accumulate_gradient(train_.colors[i], train_.ids(i), grad, weight, rng,
                                          dropout_);
    }

    [[nodiscard]] std::pair<double, std::size_t> dev_perplexity() const {
        double nll = 0.0;
        const std::size_t n = dev_->colors.size();
        for (std::size_t i = 0; i < n; ++i) nll -= model_.score_ids(dev_->colors[i], dev_->ids(i));
        return {std::exp(nll / static_cast<double>(n)), n};
    }

private:
    SequenceDecoder<float>& model_;
    FlatSequences train_;
    std::optional<FlatSequences> dev_;
    double dropout_;
};

class AtomicAdapter {
public:
    AtomicAdapter(AtomicModel<float>& model, const Dataset& train, const Dataset* dev,
                  double dropout)
        : model_(model), dropout_(dropout) {
        for (const auto& ex : train.items) {
            colors_.push_back(ex.color);
            classes_.push_back(model.inventory().find(ex.description.normalized()));
        }
        if (dev != nullptr) {
            for (const auto& ex : dev->items) {
                const int cls = model.inventory().find(ex.description.normalized());
                // unseen descriptions have zero probability under this family
                if (cls < 0) continue;
                dev_colors_.push_back(ex.color);
                dev_classes_.push_back(cls);
            }
        }
    }

    [[nodiscard]] std::size_t size() const { return colors_.size(); }
    [[nodiscard]] bool has_dev() const { return !dev_colors_.empty(); }

    double accumulate(std::size_t i, AtomicParams<float>& grad, float weight, Rng* rng) {
        return model_.accumulate_gradient(colors_[i], classes_[i], grad, weight, rng, dropout_);
    }

    [[nodiscard]] std::pair<double, std::size_t> dev_perplexity() const {
        double nll = 0.0;
        for (std::size_t i = 0; i < dev_colors_.size(); ++i) {
            nll -= model_.class_log_probs(dev_colors_[i])[static_cast<std::size_t>(dev_classes_[i])];
        }
        return {std::exp(nll / static_cast<double>(dev_colors_.size())), dev_colors_.size()};
    }

private:
    AtomicModel<float>& model_;
    std::vector<ColorHSV> colors_;
    std::vector<int> classes_;
    std::vector<ColorHSV> dev_colors_;
    std::vector<int> dev_classes_;
    double dropout_;
};

void require_nonempty(const Dataset& train) {
    if (train.empty()) throw UsageError("training set is empty");
}

}  // namespace

SequenceDecoder<float> train_sequence(const Dataset& train, const Dataset* dev,
                                      FeatureScheme features, const TrainingConfig& config,
                                      TrainingOutcome* outcome, const TrainingLogSink& sink) {
    config.validate();
    require_nonempty(train);
    SequenceConfig sc;
    sc.features = features;
    sc.conditioning = config.conditioning;
    sc.hidden = config.hidden;
    sc.embedding_dim = config.embedding_dim;
    sc.bucket_embedding_dim = config.bucket_embedding_dim;
    SequenceDecoder<float> model(sc, Vocabulary::build(train));
    Rng init_rng = Rng(config.seed).split(0);
    model.initialize(InitConfig{config.embedding_sigma, config.lstm_sigma, config.forget_bias},
                     init_rng);
    SequenceAdapter adapter(model, train, dev, config.dropout);
    TrainingOutcome local;
    run_training<SequenceDecoder<float>, SequenceParams<float>>(model, adapter, config,
                                                                outcome ? *outcome : local, sink);
    return model;
}

AtomicModel<float> train_atomic(const Dataset& train, const Dataset* dev, FeatureScheme features,
                                const TrainingConfig& config, TrainingOutcome* outcome,
                                const TrainingLogSink& sink) {
    config.validate();
    require_nonempty(train);
    AtomicConfig ac;
    ac.features = features;
    ac.hidden1 = config.hidden;
    ac.hidden2 = config.hidden;
    ac.bucket_embedding_dim = config.bucket_embedding_dim;
    AtomicModel<float> model(ac, DescriptionInventory::build(train));
    Rng init_rng = Rng(config.seed).split(0);
    model.initialize(config.embedding_sigma, init_rng);
    AtomicAdapter adapter(model, train, dev, config.dropout);
    TrainingOutcome local;
    run_training<AtomicModel<float>, AtomicParams<float>>(model, adapter, config,
                                                          outcome ? *outcome : local, sink);
    return model;
}

HistogramModel train_histogram(const Dataset& train, const TrainingConfig& config) {
    config.validate();
    require_nonempty(train);
    return HistogramModel::fit(train, config.histogram_smoothing);
}

TrainedModel train_model(ModelFamily family, FeatureScheme features, const Dataset& train,
                         const Dataset* dev, const TrainingConfig& config,
                         const TrainingLogSink& sink) {
    TrainedModel out;
    switch (family) {
        case ModelFamily::rnn:
            out.model = std::make_unique<SequenceDecoder<float>>(
                train_sequence(train, dev, features, config, &out.outcome, sink));
            break;
        case ModelFamily::atomic:
            out.model = std::make_unique<AtomicModel<float>>(
                train_atomic(train, dev, features, config, &out.outcome, sink));
            break;
        case ModelFamily::histogram:
            if (features != FeatureScheme::buckets) {
                throw UsageError("invalid config 'features': the hm family uses buckets only");
            }
            out.model = std::make_unique<HistogramModel>(train_histogram(train, config));
            break;
    }
    return out;
}

}  // namespace colordesc
