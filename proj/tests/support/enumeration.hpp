// Copyright (c) 2026, The colordesc Authors
// SPDX-License-Identifier: Apache-2.0
//
// Brute-force oracle over every token sequence of a small decoder.
#pragma once

#include <cmath>
#include <functional>
#include <vector>

#include "colordesc/models/sequence_decoder.hpp"

namespace colordesc::testing {

struct Enumerated {
    double complete_mass{0.0};  // all sequences ending in </s> within max_len content tokens
    double residual{0.0};       // prefixes of max_len tokens with no </s>
    std::vector<int> argmax;    // best emittable sequence
    double argmax_lp{-INFINITY};
};

/// Walks every token sequence up to max_len with the model's own step function.
inline Enumerated enumerate(const SequenceDecoder<double>& m, const ColorHSV& c, int max_len) {
    Enumerated out;
    const int V = m.vocab().size();
    const auto f = m.feature_block(c);
    std::function<void(std::vector<int>&, SequenceDecoder<double>::State, double)> walk =
        [&](std::vector<int>& ids, SequenceDecoder<double>::State s, double lp) {
            const int depth = static_cast<int>(ids.size()) - 1;
            const auto step = m.step_log_probs(f, s, ids.back());
            out.complete_mass += std::exp(lp + step[Vocabulary::kEnd]);
            if (depth > 0) {
                bool emittable = true;
                for (std::size_t i = 1; i < ids.size(); ++i)
                    emittable = emittable && ids[i] != Vocabulary::kStart && ids[i] != Vocabulary::kUnknown;
                const double full = lp + step[Vocabulary::kEnd];
                if (emittable && full > out.argmax_lp) {
                    out.argmax_lp = full;
                    out.argmax = ids;
                    out.argmax.push_back(Vocabulary::kEnd);
                }
            }
            for (int tok = 0; tok < V; ++tok) {
                if (tok == Vocabulary::kEnd) continue;
                const double next = lp + step[static_cast<std::size_t>(tok)];
                if (depth + 1 == max_len) {
                    out.residual += std::exp(next);
                    continue;
                }
                ids.push_back(tok);
                walk(ids, s, next);
                ids.pop_back();
            }
        };
    std::vector<int> ids{Vocabulary::kStart};
    walk(ids, m.initial_state(f), 0.0);
    return out;
}

}  // namespace colordesc::testing
