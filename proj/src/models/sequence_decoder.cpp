// Copyright (c) 2026, The colordesc Authors
// SPDX-License-Identifier: Apache-2.0
#include "colordesc/models/sequence_decoder.hpp"

#include <cmath>
#include <limits>

#include "colordesc/errors.hpp"
#include "colordesc/kernel/optim.hpp"
#include "colordesc/models/decoding.hpp"

namespace colordesc {

std::string to_string(Conditioning mode) {
    return mode == Conditioning::every_step ? "every-step" : "init-state";
}

Conditioning parse_conditioning(std::string_view name) {
    if (name == "every-step") return Conditioning::every_step;
    if (name == "init-state") return Conditioning::init_state;
    throw UsageError("unknown conditioning mode '" + std::string(name) +
                     "' (every-step|init-state)");
}

template <typename T>
SequenceParams<T>::SequenceParams(const SequenceConfig& cfg, int vocab_size) {
    if (cfg.hidden < 1 || cfg.embedding_dim < 1 || cfg.bucket_embedding_dim < 1 || vocab_size < 3) {
        throw UsageError("sequence model sizes must be >= 1 and vocabulary >= 3");
    }
    const auto V = static_cast<std::size_t>(vocab_size);
    const auto H = static_cast<std::size_t>(cfg.hidden);
    const auto E = static_cast<std::size_t>(cfg.embedding_dim);
    const auto F = static_cast<std::size_t>(cfg.feature_dim());
    token_embedding = Tensor<T>({V, E});
    if (cfg.features == FeatureScheme::buckets) {
        const auto B = static_cast<std::size_t>(cfg.bucket_embedding_dim);
        bucket_coarse = Tensor<T>({static_cast<std::size_t>(kCoarseGrid.size()), B});
        bucket_mid = Tensor<T>({static_cast<std::size_t>(kMidGrid.size()), B});
        bucket_global = Tensor<T>({static_cast<std::size_t>(kGlobalGrid.size()), B});
    }
    if (cfg.conditioning == Conditioning::init_state) {
        init_weight = Tensor<T>({2 * H, F});
        init_bias = Tensor<T>({2 * H});
    }
    lstm = LstmParams<T>(static_cast<std::size_t>(cfg.lstm_input_dim()), H);
    out_weight = Tensor<T>({V, H});
    out_bias = Tensor<T>({V});
}

template <typename T>
std::vector<NamedTensor<T>> SequenceParams<T>::named() {
    std::vector<NamedTensor<T>> all{
        {"token_embedding", &token_embedding}, {"bucket_coarse", &bucket_coarse},
        {"bucket_mid", &bucket_mid},           {"bucket_global", &bucket_global},
        {"init_weight", &init_weight},         {"init_bias", &init_bias},
        {"lstm.w_x", &lstm.w_x},               {"lstm.w_h", &lstm.w_h},
        {"lstm.peephole", &lstm.peephole},     {"lstm.bias", &lstm.bias},
        {"out_weight", &out_weight},           {"out_bias", &out_bias},
    };
    std::erase_if(all, [](const auto& nt) { return nt.tensor->empty(); });
    return all;
}

template <typename T>
std::vector<ConstNamedTensor<T>> SequenceParams<T>::named() const {
    std::vector<ConstNamedTensor<T>> out;
    for (const auto& nt : const_cast<SequenceParams*>(this)->named()) {
        out.push_back({nt.name, nt.tensor});
    }
    return out;
}

template <typename T>
std::int64_t SequenceParams<T>::size() const {
    std::int64_t n = 0;
    for (const auto& nt : named()) n += static_cast<std::int64_t>(nt.tensor->size());
    return n;
}

template <typename T>
SequenceDecoder<T>::SequenceDecoder(SequenceConfig config, Vocabulary vocab)
    : config_(config), vocab_(std::move(vocab)), params_(config_, vocab_.size()) {}

template <typename T>
void SequenceDecoder<T>::initialize(const InitConfig& init, Rng& rng) {
    auto& p = params_;
    init_normal(p.token_embedding, init.embedding_sigma, rng);
    init_normal(p.bucket_coarse, init.embedding_sigma, rng);
    init_normal(p.bucket_mid, init.embedding_sigma, rng);
    init_normal(p.bucket_global, init.embedding_sigma, rng);
    if (!p.init_weight.empty()) {
        init_glorot_uniform(p.init_weight, rng);
        p.init_bias.fill(T{0});
    }
    init_normal(p.lstm.w_x, init.lstm_sigma, rng);
    init_normal(p.lstm.w_h, init.lstm_sigma, rng);
    init_normal(p.lstm.peephole, init.lstm_sigma, rng);
    p.lstm.bias.fill(T{0});
    for (auto& b : p.lstm.forget_bias()) b = static_cast<T>(init.forget_bias);
    init_glorot_uniform(p.out_weight, rng);
    p.out_bias.fill(T{0});
}

template <typename T>
std::vector<T> SequenceDecoder<T>::feature_block(const ColorHSV& c) const {
    const FeatureVector fv = featurize(config_.features, c);
    if (config_.features != FeatureScheme::buckets) {
        return std::vector<T>(fv.values.begin(), fv.values.end());
    }
    std::vector<T> f;
    f.reserve(static_cast<std::size_t>(config_.feature_dim()));
    for (const auto row : {params_.bucket_coarse.row(static_cast<std::size_t>(fv.buckets.coarse)),
                           params_.bucket_mid.row(static_cast<std::size_t>(fv.buckets.mid)),
                           params_.bucket_global.row(static_cast<std::size_t>(fv.buckets.global))}) {
        f.insert(f.end(), row.begin(), row.end());
    }
    return f;
}

template <typename T>
typename SequenceDecoder<T>::State SequenceDecoder<T>::initial_state(std::span<const T> f) const {
    const auto H = static_cast<std::size_t>(config_.hidden);
    State s{std::vector<T>(H, T{0}), std::vector<T>(H, T{0})};
    if (config_.conditioning == Conditioning::init_state) {
        const auto z = dense_forward<T>(params_.init_weight, params_.init_bias, f);
        for (std::size_t k = 0; k < H; ++k) {
            s.h[k] = std::tanh(z[k]);
            s.c[k] = z[H + k];
        }
    }
    return s;
}

template <typename T>
void SequenceDecoder<T>::embed_step_input(std::span<const T> f, int token,
                                          std::vector<T>& x) const {
    x.clear();
    if (config_.conditioning == Conditioning::every_step) {
        x.insert(x.end(), f.begin(), f.end());
    }
    const auto e = params_.token_embedding.row(static_cast<std::size_t>(token));
    x.insert(x.end(), e.begin(), e.end());
}

template <typename T>
std::vector<double> SequenceDecoder<T>::step_log_probs(std::span<const T> f, State& state,
                                                       int prev_token) const {
    std::vector<T> x;
    embed_step_input(f, prev_token, x);
    LstmCache<T> cache;
    lstm_step<T>(params_.lstm, x, state.h, state.c, cache);
    state.h = std::move(cache.h);
    state.c = std::move(cache.c);
    const auto logits = dense_forward<T>(params_.out_weight, params_.out_bias, state.h);
    const auto lp = log_softmax<T>(logits);
    return std::vector<double>(lp.begin(), lp.end());
}

template <typename T>
double SequenceDecoder<T>::score_ids(const ColorHSV& c, std::span<const int> ids) const {
    if (ids.size() < 3 || ids.front() != Vocabulary::kStart || ids.back() != Vocabulary::kEnd) {
        throw UsageError("score_ids: expected <s> content... </s> with at least one token");
    }
    const auto f = feature_block(c);
    State s = initial_state(f);
    double total = 0.0;
    for (std::size_t t = 0; t + 1 < ids.size(); ++t) {
        const auto lp = step_log_probs(f, s, ids[t]);
        total += lp[static_cast<std::size_t>(ids[t + 1])];
    }
    return total;
}

template <typename T>
double SequenceDecoder<T>::accumulate_gradient(const ColorHSV& c, std::span<const int> ids,
                                               SequenceParams<T>& grad, T weight,
                                               Rng* dropout_rng, double dropout_rate) const {
    const auto& p = params_;
    const auto H = static_cast<std::size_t>(config_.hidden);
    const auto F = static_cast<std::size_t>(config_.feature_dim());
    const bool every_step = config_.conditioning == Conditioning::every_step;
    if (ids.size() < 2 || ids.front() != Vocabulary::kStart) {
        throw ShapeError("accumulate_gradient: ids must start with <s> and contain a target");
    }
    // positions after the first </s> are padding and carry no loss
    std::size_t steps = ids.size() - 1;
    for (std::size_t t = 1; t < ids.size(); ++t) {
        if (ids[t] == Vocabulary::kEnd) {
            steps = t;
            break;
        }
    }

    const auto f = feature_block(c);
    State s0 = initial_state(f);

    std::vector<LstmCache<T>> caches(steps);
    std::vector<std::vector<T>> dropped(steps), masks(steps), probs(steps);
    std::vector<T> x;
    double loss = 0.0;
    {
        std::span<const T> h = s0.h;
        std::span<const T> cc = s0.c;
        for (std::size_t t = 0; t < steps; ++t) {
            embed_step_input(f, ids[t], x);
            lstm_step<T>(p.lstm, x, h, cc, caches[t]);
            h = caches[t].h;
            cc = caches[t].c;
            dropped[t] = caches[t].h;
            if (dropout_rng != nullptr) {
                masks[t] = dropout_apply<T>(dropped[t], dropout_rate, *dropout_rng, true);
            } else {
                masks[t].assign(H, T{1});
            }
            const auto logits = dense_forward<T>(p.out_weight, p.out_bias, dropped[t]);
            const auto lp = log_softmax<T>(logits);
            const auto target = static_cast<std::size_t>(ids[t + 1]);
            loss -= static_cast<double>(lp[target]);
            probs[t].resize(lp.size());
            for (std::size_t k = 0; k < lp.size(); ++k) probs[t][k] = std::exp(lp[k]);
        }
    }
    if (!std::isfinite(loss)) {
        throw NumericError("non-finite sequence loss");
    }

    std::vector<T> dh(H), dh_prev(H), dc(H, T{0}), dx, df(F, T{0});
    std::vector<T> dhd(H);
    std::fill(dh_prev.begin(), dh_prev.end(), T{0});
    for (std::size_t t = steps; t-- > 0;) {
        auto& dlogits = probs[t];
        dlogits[static_cast<std::size_t>(ids[t + 1])] -= T{1};
        for (auto& g : dlogits) g *= weight;
        for (std::size_t k = 0; k < dlogits.size(); ++k) grad.out_bias[k] += dlogits[k];
        outer_add<T>(grad.out_weight, dlogits, dropped[t]);
        std::fill(dhd.begin(), dhd.end(), T{0});
        matvec_transpose_add<T>(p.out_weight, dlogits, dhd);
        for (std::size_t k = 0; k < H; ++k) dh[k] = dhd[k] * masks[t][k] + dh_prev[k];

        dx.assign(p.lstm.input_dim(), T{0});
        std::fill(dh_prev.begin(), dh_prev.end(), T{0});
        lstm_step_backward<T>(p.lstm, caches[t], dh, dc, grad.lstm, dx, dh_prev);

        std::size_t offset = 0;
        if (every_step) {
            for (std::size_t k = 0; k < F; ++k) df[k] += dx[k];
            offset = F;
        }
        auto demb = grad.token_embedding.row(static_cast<std::size_t>(ids[t]));
        for (std::size_t k = 0; k < demb.size(); ++k) demb[k] += dx[offset + k];
    }

    if (config_.conditioning == Conditioning::init_state) {
        // dh_prev, dc now hold dL/dh_0 and dL/dc_0
        std::vector<T> dz(2 * H);
        for (std::size_t k = 0; k < H; ++k) {
            dz[k] = dh_prev[k] * (T{1} - s0.h[k] * s0.h[k]);
            dz[H + k] = dc[k];
        }
        for (std::size_t k = 0; k < 2 * H; ++k) grad.init_bias[k] += dz[k];
        outer_add<T>(grad.init_weight, dz, f);
        matvec_transpose_add<T>(p.init_weight, dz, df);
    }

    if (config_.features == FeatureScheme::buckets) {
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
void SequenceDecoder<T>::check_encodable(std::span<const std::string> tokens) const {
    if (tokens.empty()) throw UsageError("empty description");
    for (const auto& t : tokens) {
        if (!vocab_.find(t)) {
            throw UsageError("token '" + t + "' is not in the model vocabulary");
        }
    }
}

template <typename T>
double SequenceDecoder<T>::log_prob(const ColorHSV& c, std::span<const std::string> tokens) const {
    if (tokens.empty()) throw UsageError("empty description");
    const auto ids = vocab_.encode(tokens);
    return score_ids(c, ids);
}

template <typename T>
std::vector<int> SequenceDecoder<T>::top1_ids(const ColorHSV& c, int beam_width, int max_len,
                                              double* log_prob) const {
    const auto f = feature_block(c);
    auto step = [&](State& s, int prev) { return step_log_probs(f, s, prev); };
    DecodeOptions opt;
    opt.start_id = Vocabulary::kStart;
    opt.end_id = Vocabulary::kEnd;
    opt.banned = {Vocabulary::kUnknown};
    opt.beam_width = beam_width;
    opt.max_len = max_len;
    Hypothesis best = beam_search(initial_state(f), step, opt);
    if (beam_width > 1) {
        // a wide beam can prune the greedy path; keep whichever completed sequence scores higher
        opt.beam_width = 1;
        Hypothesis greedy = beam_search(initial_state(f), step, opt);
        if (greedy.log_prob > best.log_prob) best = std::move(greedy);
    }
    if (log_prob != nullptr) *log_prob = best.log_prob;
    return best.ids;
}

template <typename T>
std::vector<std::string> SequenceDecoder<T>::top1(const ColorHSV& c, int beam_width) const {
    return vocab_.decode(top1_ids(c, beam_width));
}

template <typename T>
std::vector<std::string> SequenceDecoder<T>::sample(const ColorHSV& c, Rng& rng,
                                                    int max_len) const {
    const auto f = feature_block(c);
    auto step = [&](State& s, int prev) { return step_log_probs(f, s, prev); };
    DecodeOptions opt;
    opt.start_id = Vocabulary::kStart;
    opt.end_id = Vocabulary::kEnd;
    opt.banned = {Vocabulary::kUnknown};
    opt.max_len = max_len;
    return vocab_.decode(sample_sequence(initial_state(f), step, rng, opt));
}

template struct SequenceParams<float>;
template struct SequenceParams<double>;
template class SequenceDecoder<float>;
template class SequenceDecoder<double>;

}  // namespace colordesc
