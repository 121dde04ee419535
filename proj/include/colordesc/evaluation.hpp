// Copyright (c) 2026, The colordesc Authors
// SPDX-License-Identifier: Apache-2.0
//
// Per-description perplexity, AIC, recall@1 accuracy and the paired
// approximate randomization test.
//
// Conventions: ell is the total negative log-likelihood in bits, so
// perplexity = 2^(ell / N) and AIC = 2 ell + 2 k.
#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

#include "colordesc/corpus.hpp"
#include "colordesc/models/model.hpp"

namespace colordesc {

inline constexpr std::string_view kEvalReportSchema = "colordesc.eval-report/1";
inline constexpr int kDefaultPermutationRounds = 10000;

struct EvalReport {
    std::string split;
    std::string family;
    std::string features;
    std::size_t n{0};
    std::vector<double> log2_probs;
    std::vector<std::uint8_t> hits;
    double perplexity{0.0};
    double ell_bits{0.0};
    std::int64_t k{0};
    double aic{0.0};
    double accuracy{0.0};  // percent
    int beam_width{0};
    std::size_t zero_probability_items{0};
    std::string created;  // ISO-8601 UTC; the only field allowed to differ between re-runs
};

struct EvalOptions {
    int beam_width{10};
    /// Drop zero-probability items from ell/perplexity instead of failing.
    bool exclude_zero{false};
    bool compute_accuracy{true};
};

/// Base-2 log probability of every item, in dataset order (-inf for zero mass).
std::vector<double> item_log2_probs(const ConditionalModel& model, const Dataset& data);

/// Total negative log2 likelihood. Throws NumericError on any -inf item unless
/// exclude_zero is set, in which case those items are dropped and counted.
double total_nll_bits(std::span<const double> log2_probs, bool exclude_zero = false,
                      std::size_t* zero_count = nullptr);

/// 2^(ell / N) over the items that were kept.
double perplexity_from_log2(std::span<const double> log2_probs, bool exclude_zero = false);
double perplexity(const ConditionalModel& model, const Dataset& data, bool exclude_zero = false);

double aic(double ell_bits, double k);

std::int64_t count_params(const ConditionalModel& model);

/// Percentage of items whose top-1 prediction equals the reference token sequence.
double accuracy(const ConditionalModel& model, const Dataset& data, int beam_width);
std::vector<std::uint8_t> top1_hits(const ConditionalModel& model, const Dataset& data,
                                    int beam_width);

/// Paired approximate randomization on the mean difference. Each round swaps
/// every pair with probability 1/2; p = (#{|stat*| >= |stat|} + 1) / (R + 1).
double permutation_test(std::span<const double> a, std::span<const double> b,
                        int rounds = kDefaultPermutationRounds, std::uint64_t seed = 0);

EvalReport evaluate(const ConditionalModel& model, const Dataset& data, const EvalOptions& options);

nlohmann::json to_json(const EvalReport& report);
EvalReport eval_report_from_json(const nlohmann::json& j);
void write_eval_report(const EvalReport& report, const std::filesystem::path& path);
EvalReport read_eval_report(const std::filesystem::path& path);

}  // namespace colordesc
