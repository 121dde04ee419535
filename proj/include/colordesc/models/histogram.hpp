// Copyright (c) 2026, The colordesc Authors
// SPDX-License-Identifier: Apache-2.0
//
// Bucket-histogram baseline ("HM-like"). Counts descriptions per HSV bucket at
// 90x10x10, 45x5x5 and 1x1x1. A query uses the finest bucket with any data and
// add-one smooths over the description inventory within it.
#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "colordesc/corpus.hpp"
#include "colordesc/features.hpp"
#include "colordesc/models/atomic.hpp"
#include "colordesc/models/model.hpp"

namespace colordesc {

class HistogramModel final : public ConditionalModel {
public:
    enum Resolution { kCoarse = 0, kMid = 1, kGlobal = 2 };

    struct Bucket {
        std::uint64_t total{0};
        std::map<int, std::uint32_t> counts;  // inventory index -> count
    };
    using Table = std::map<int, Bucket>;  // cell id -> bucket

    explicit HistogramModel(DescriptionInventory inventory, double smoothing = 1.0);

    static HistogramModel fit(const Dataset& train, double smoothing = 1.0);

    void add(const ColorHSV& c, int description_index, std::uint32_t count = 1);
    /// Adds counts to one cell of a single resolution (used when restoring checkpoints).
    void add_to_cell(Resolution r, int cell, int description_index, std::uint32_t count);

    /// The bucket a query falls back to, with its resolution.
    [[nodiscard]] std::pair<Resolution, const Bucket*> resolve(const ColorHSV& c) const;

    /// Smoothed P(d | c). Descriptions outside the inventory get the smoothing floor.
    [[nodiscard]] double probability(const ColorHSV& c, const std::string& normalized) const;

    [[nodiscard]] const DescriptionInventory& inventory() const { return inventory_; }
    [[nodiscard]] double smoothing() const { return smoothing_; }
    [[nodiscard]] const Table& table(Resolution r) const { return tables_[r]; }
    /// Number of cells (across all resolutions) with at least one count.
    [[nodiscard]] std::int64_t nonempty_buckets() const;

    [[nodiscard]] ModelFamily family() const override { return ModelFamily::histogram; }
    [[nodiscard]] FeatureScheme features() const override { return FeatureScheme::buckets; }
    [[nodiscard]] double log_prob(const ColorHSV& c,
                                  std::span<const std::string> tokens) const override;
    [[nodiscard]] std::vector<std::string> top1(const ColorHSV& c,
                                                int beam_width = kDefaultBeamWidth) const override;
    [[nodiscard]] std::vector<std::string> sample(const ColorHSV& c, Rng& rng,
                                                  int max_len = kDefaultMaxLength) const override;
    /// (inventory - 1) free probabilities per nonempty bucket.
    [[nodiscard]] std::int64_t parameter_count() const override;
    void check_encodable(std::span<const std::string> tokens) const override;

private:
    DescriptionInventory inventory_;
    double smoothing_;
    std::array<Table, 3> tables_;
};

/// hm_probability: P(d | c) under the histogram model.
inline double hm_probability(const HistogramModel& model, const ColorHSV& c,
                             const std::string& normalized_description) {
    return model.probability(c, normalized_description);
}

}  // namespace colordesc
