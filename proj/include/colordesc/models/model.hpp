// Copyright (c) 2026, The colordesc Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "colordesc/color.hpp"
#include "colordesc/features.hpp"
#include "colordesc/kernel/rng.hpp"

namespace colordesc {

enum class ModelFamily { rnn, atomic, histogram };

std::string to_string(ModelFamily family);
/// Accepts "rnn", "atomic", "hm" (or "histogram").
ModelFamily parse_model_family(std::string_view name);

inline constexpr int kDefaultBeamWidth = 10;
inline constexpr int kDefaultMaxLength = 20;

/// A conditional distribution S(d | c) over descriptions given a color.
/// Implementations are immutable after training and safe to share across threads.
class ConditionalModel {
public:
    virtual ~ConditionalModel() = default;

    [[nodiscard]] virtual ModelFamily family() const = 0;
    [[nodiscard]] virtual FeatureScheme features() const = 0;

    /// Natural-log probability of a tokenized description (dropout off).
    /// Returns -infinity when the model assigns the description no mass.
    [[nodiscard]] virtual double log_prob(const ColorHSV& c,
                                          std::span<const std::string> tokens) const = 0;

    /// Most likely description; beam_width only matters for sequence models.
    [[nodiscard]] virtual std::vector<std::string> top1(const ColorHSV& c,
                                                        int beam_width = kDefaultBeamWidth) const = 0;

    [[nodiscard]] virtual std::vector<std::string> sample(const ColorHSV& c, Rng& rng,
                                                          int max_len = kDefaultMaxLength) const = 0;

    /// Number of free real-valued parameters (k in AIC).
    [[nodiscard]] virtual std::int64_t parameter_count() const = 0;

    /// Throws UsageError if the model cannot generate this description at all
    /// (out-of-vocabulary token, unseen atomic description, empty text).
    virtual void check_encodable(std::span<const std::string> tokens) const = 0;
};

}  // namespace colordesc
