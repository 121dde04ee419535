// Copyright (c) 2026, The colordesc Authors
// SPDX-License-Identifier: Apache-2.0
#include "colordesc/models/histogram.hpp"

#include <cmath>
#include <limits>

#include "colordesc/errors.hpp"

namespace colordesc {

namespace {

constexpr std::array<BucketGrid, 3> kGrids{kCoarseGrid, kMidGrid, kGlobalGrid};

}  // namespace

HistogramModel::HistogramModel(DescriptionInventory inventory, double smoothing)
    : inventory_(std::move(inventory)), smoothing_(smoothing) {
    if (inventory_.size() < 1) throw UsageError("histogram model needs a nonempty inventory");
    if (!(smoothing_ > 0.0)) throw UsageError("histogram smoothing must be > 0");
}

HistogramModel HistogramModel::fit(const Dataset& train, double smoothing) {
    HistogramModel m(DescriptionInventory::build(train), smoothing);
    for (const auto& ex : train.items) {
        m.add(ex.color, m.inventory_.find(ex.description.normalized()));
    }
    return m;
}

void HistogramModel::add(const ColorHSV& c, int description_index, std::uint32_t count) {
    if (description_index < 0 || description_index >= inventory_.size()) {
        throw UsageError("histogram: description index out of range");
    }
    for (std::size_t r = 0; r < kGrids.size(); ++r) {
        auto& b = tables_[r][bucket_cell(c, kGrids[r])];
        b.total += count;
        b.counts[description_index] += count;
    }
}

void HistogramModel::add_to_cell(Resolution r, int cell, int description_index,
                                 std::uint32_t count) {
    if (description_index < 0 || description_index >= inventory_.size() || cell < 0 ||
        cell >= kGrids[static_cast<std::size_t>(r)].size()) {
        throw FormatError("histogram cell or description index out of range");
    }
    auto& b = tables_[static_cast<std::size_t>(r)][cell];
    b.total += count;
    b.counts[description_index] += count;
}

std::pair<HistogramModel::Resolution, const HistogramModel::Bucket*> HistogramModel::resolve(
    const ColorHSV& c) const {
    for (std::size_t r = 0; r < kGrids.size(); ++r) {
        const auto it = tables_[r].find(bucket_cell(c, kGrids[r]));
        if (it != tables_[r].end() && it->second.total > 0) {
            return {static_cast<Resolution>(r), &it->second};
        }
    }
    return {kGlobal, nullptr};
}

double HistogramModel::probability(const ColorHSV& c, const std::string& normalized) const {
    const auto [res, bucket] = resolve(c);
    const double denom =
        (bucket ? static_cast<double>(bucket->total) : 0.0) + smoothing_ * inventory_.size();
    const int idx = inventory_.find(normalized);
    double n = 0.0;
    if (idx >= 0 && bucket != nullptr) {
        const auto it = bucket->counts.find(idx);
        if (it != bucket->counts.end()) n = it->second;
    }
    return (n + smoothing_) / denom;
}

std::int64_t HistogramModel::nonempty_buckets() const {
    std::int64_t n = 0;
    for (const auto& t : tables_) {
        for (const auto& [cell, b] : t) n += b.total > 0 ? 1 : 0;
    }
    return n;
}

double HistogramModel::log_prob(const ColorHSV& c, std::span<const std::string> tokens) const {
    if (tokens.empty()) throw UsageError("empty description");
    return std::log(probability(c, join_tokens(tokens)));
}

std::vector<std::string> HistogramModel::top1(const ColorHSV& c, int /*beam_width*/) const {
    const auto [res, bucket] = resolve(c);
    int best = 0;
    std::uint32_t best_n = 0;
    if (bucket != nullptr) {
        // std::map iterates in index order, so ties resolve to the more frequent overall description
        for (const auto& [idx, n] : bucket->counts) {
            if (n > best_n) {
                best = idx;
                best_n = n;
            }
        }
    }
    return tokenize(inventory_.at(best));
}

std::vector<std::string> HistogramModel::sample(const ColorHSV& c, Rng& rng, int /*max_len*/) const {
    const auto [res, bucket] = resolve(c);
    const double denom =
        (bucket ? static_cast<double>(bucket->total) : 0.0) + smoothing_ * inventory_.size();
    const double r = rng.uniform() * denom;
    double acc = 0.0;
    for (int i = 0; i < inventory_.size(); ++i) {
        double n = smoothing_;
        if (bucket != nullptr) {
            const auto it = bucket->counts.find(i);
            if (it != bucket->counts.end()) n += it->second;
        }
        acc += n;
        if (r < acc) return tokenize(inventory_.at(i));
    }
    return tokenize(inventory_.at(inventory_.size() - 1));
}

std::int64_t HistogramModel::parameter_count() const {
    return static_cast<std::int64_t>(inventory_.size() - 1) * nonempty_buckets();
}

void HistogramModel::check_encodable(std::span<const std::string> tokens) const {
    if (tokens.empty()) throw UsageError("empty description");
    if (inventory_.find(join_tokens(tokens)) < 0) {
        throw UsageError("description '" + join_tokens(tokens) +
                         "' is not in the histogram model's inventory");
    }
}

}  // namespace colordesc
