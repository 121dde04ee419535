// Copyright (c) 2026, The colordesc Authors
// SPDX-License-Identifier: Apache-2.0
//
// Search and sampling over token sequences for any step-wise model. A step
// function has the signature
//     std::vector<double> step(State& state, int previous_token)
// and returns log-probabilities over the full vocabulary for the next token,
// advancing `state` in place.
#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "colordesc/kernel/rng.hpp"

namespace colordesc {

struct DecodeOptions {
    int start_id{0};
    int end_id{1};
    /// Never emitted (e.g. <s> and <unk>).
    std::vector<int> banned;
    int beam_width{10};
    /// Maximum number of content tokens before </s>.
    int max_len{20};
};

struct Hypothesis {
    std::vector<int> ids;  // <s> ... </s>
    double log_prob{-std::numeric_limits<double>::infinity()};
};

namespace detail {

inline bool emittable(int tok, int step, const DecodeOptions& opt) {
    if (std::find(opt.banned.begin(), opt.banned.end(), tok) != opt.banned.end()) return false;
    if (tok == opt.start_id) return false;
    // descriptions are nonempty
    if (tok == opt.end_id && step == 0) return false;
    return true;
}

template <typename State>
struct Live {
    std::vector<int> ids;
    double log_prob;
    State state;
};

inline bool better(double a_lp, const std::vector<int>& a, double b_lp, const std::vector<int>& b) {
    if (a_lp != b_lp) return a_lp > b_lp;
    return a < b;
}

}  // namespace detail

/// Beam search over nonempty sequences of at most max_len content tokens,
/// ranking completed sequences by total log-probability (including </s>).
/// Completed hypotheses leave the beam; search stops once the best completed
/// score is at least the best live prefix score, since extensions only lose mass.
template <typename State, typename StepFn>
Hypothesis beam_search(const State& initial, StepFn&& step, const DecodeOptions& opt) {
    if (opt.beam_width < 1) throw std::invalid_argument("beam width must be >= 1");
    if (opt.max_len < 1) throw std::invalid_argument("max_len must be >= 1");
    std::vector<detail::Live<State>> live{{{opt.start_id}, 0.0, initial}};
    Hypothesis best;
    struct Candidate {
        std::size_t parent;
        int token;
        double log_prob;
    };
    for (int depth = 0; depth <= opt.max_len && !live.empty(); ++depth) {
        std::vector<Candidate> candidates;
        std::vector<State> advanced;
        advanced.reserve(live.size());
        for (std::size_t hi = 0; hi < live.size(); ++hi) {
            State s = live[hi].state;
            const std::vector<double> lp = step(s, live[hi].ids.back());
            advanced.push_back(std::move(s));
            if (depth > 0) {
                const double done = live[hi].log_prob + lp[static_cast<std::size_t>(opt.end_id)];
                auto ids = live[hi].ids;
                ids.push_back(opt.end_id);
                if (detail::better(done, ids, best.log_prob, best.ids)) {
                    best.log_prob = done;
                    best.ids = std::move(ids);
                }
            }
            if (depth == opt.max_len) continue;
            for (int tok = 0; tok < static_cast<int>(lp.size()); ++tok) {
                if (tok == opt.end_id || !detail::emittable(tok, depth, opt)) continue;
                candidates.push_back({hi, tok, live[hi].log_prob + lp[static_cast<std::size_t>(tok)]});
            }
        }
        const std::size_t keep = std::min<std::size_t>(candidates.size(),
                                                        static_cast<std::size_t>(opt.beam_width));
        auto cmp = [&](const Candidate& a, const Candidate& b) {
            if (a.log_prob != b.log_prob) return a.log_prob > b.log_prob;
            if (a.parent != b.parent) return a.parent < b.parent;
            return a.token < b.token;
        };
        std::partial_sort(candidates.begin(), candidates.begin() + static_cast<std::ptrdiff_t>(keep),
                          candidates.end(), cmp);
        std::vector<detail::Live<State>> next;
        next.reserve(keep);
        for (std::size_t k = 0; k < keep; ++k) {
            const auto& cand = candidates[k];
            if (!std::isfinite(cand.log_prob)) break;
            auto ids = live[cand.parent].ids;
            ids.push_back(cand.token);
            next.push_back({std::move(ids), cand.log_prob, advanced[cand.parent]});
        }
        live = std::move(next);
        if (!live.empty() && best.log_prob >= live.front().log_prob) break;
    }
    return best;
}

/// Ancestral sampling. Banned tokens (and </s> at the first position) have
/// their mass renormalized away. After max_len content tokens </s> is forced.
template <typename State, typename StepFn>
std::vector<int> sample_sequence(const State& initial, StepFn&& step, Rng& rng,
                                 const DecodeOptions& opt) {
    State s = initial;
    std::vector<int> ids{opt.start_id};
    for (int depth = 0; depth < opt.max_len; ++depth) {
        const std::vector<double> lp = step(s, ids.back());
        std::vector<double> w(lp.size(), 0.0);
        double total = 0.0;
        for (int tok = 0; tok < static_cast<int>(lp.size()); ++tok) {
            if (!detail::emittable(tok, depth, opt)) continue;
            w[static_cast<std::size_t>(tok)] = std::exp(lp[static_cast<std::size_t>(tok)]);
            total += w[static_cast<std::size_t>(tok)];
        }
        if (!(total > 0.0)) break;
        const double r = rng.uniform() * total;
        double acc = 0.0;
        int chosen = -1;
        for (int tok = 0; tok < static_cast<int>(w.size()); ++tok) {
            if (w[static_cast<std::size_t>(tok)] == 0.0) continue;
            acc += w[static_cast<std::size_t>(tok)];
            chosen = tok;
            if (r < acc) break;
        }
        ids.push_back(chosen);
        if (chosen == opt.end_id) return ids;
    }
    ids.push_back(opt.end_id);
    return ids;
}

}  // namespace colordesc
