// Copyright (c) 2026, The colordesc Authors
// SPDX-License-Identifier: Apache-2.0
#include "colordesc/evaluation.hpp"

#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <limits>
#include <numbers>

#include "colordesc/errors.hpp"
#include "colordesc/kernel/rng.hpp"

namespace colordesc {

std::vector<double> item_log2_probs(const ConditionalModel& model, const Dataset& data) {
    std::vector<double> out;
    out.reserve(data.size());
    for (const auto& ex : data.items) {
        out.push_back(model.log_prob(ex.color, ex.description.tokens) / std::numbers::ln2);
    }
    return out;
}

double total_nll_bits(std::span<const double> log2_probs, bool exclude_zero,
                      std::size_t* zero_count) {
    double ell = 0.0;
    std::size_t zeros = 0;
    for (const double lp : log2_probs) {
        if (std::isinf(lp) && lp < 0) {
            ++zeros;
            continue;
        }
        if (!std::isfinite(lp)) throw NumericError("non-finite item log probability");
        ell -= lp;
    }
    if (zero_count != nullptr) *zero_count = zeros;
    if (zeros > 0 && !exclude_zero) {
        throw NumericError(std::to_string(zeros) +
                           " item(s) have probability 0 under the model; rerun with "
                           "--exclude-zero to drop them");
    }
    return ell;
}

double perplexity_from_log2(std::span<const double> log2_probs, bool exclude_zero) {
    std::size_t zeros = 0;
    const double ell = total_nll_bits(log2_probs, exclude_zero, &zeros);
    const std::size_t kept = log2_probs.size() - zeros;
    if (kept == 0) throw NumericError("perplexity of an empty item set");
    return std::exp2(ell / static_cast<double>(kept));
}

double perplexity(const ConditionalModel& model, const Dataset& data, bool exclude_zero) {
    return perplexity_from_log2(item_log2_probs(model, data), exclude_zero);
}

double aic(double ell_bits, double k) {
    return 2.0 * ell_bits + 2.0 * k;
}

std::int64_t count_params(const ConditionalModel& model) {
    return model.parameter_count();
}

std::vector<std::uint8_t> top1_hits(const ConditionalModel& model, const Dataset& data,
                                    int beam_width) {
    std::vector<std::uint8_t> hits;
    hits.reserve(data.size());
    for (const auto& ex : data.items) {
        hits.push_back(model.top1(ex.color, beam_width) == ex.description.tokens ? 1 : 0);
    }
    return hits;
}

double accuracy(const ConditionalModel& model, const Dataset& data, int beam_width) {
    if (data.empty()) return 0.0;
    const auto hits = top1_hits(model, data, beam_width);
    std::size_t n = 0;
    for (const auto h : hits) n += h;
    return 100.0 * static_cast<double>(n) / static_cast<double>(hits.size());
}

double permutation_test(std::span<const double> a, std::span<const double> b, int rounds,
                        std::uint64_t seed) {
    if (a.size() != b.size()) {
        throw UsageError("permutation_test: paired vectors differ in length (" +
                         std::to_string(a.size()) + " vs " + std::to_string(b.size()) + ")");
    }
    if (rounds < 1) throw UsageError("permutation_test: rounds must be >= 1");
    const std::size_t n = a.size();
    if (n == 0) return 1.0;
    std::vector<double> diff(n);
    double observed = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        diff[i] = a[i] - b[i];
        observed += diff[i];
    }
    observed = std::abs(observed / static_cast<double>(n));
    // absorb summation-order rounding so exact ties count as ties
    const double tol = 1e-12 * std::max(1.0, observed);

    Rng rng(seed);
    std::size_t at_least = 0;
    for (int r = 0; r < rounds; ++r) {
        double sum = 0.0;
        std::uint64_t bits = 0;
        for (std::size_t i = 0; i < n; ++i) {
            if (i % 64 == 0) bits = rng.next_u64();
            sum += (bits & 1u) ? -diff[i] : diff[i];
            bits >>= 1;
        }
        if (std::abs(sum / static_cast<double>(n)) >= observed - tol) ++at_least;
    }
    return static_cast<double>(at_least + 1) / static_cast<double>(rounds + 1);
}

namespace {

std::string utc_now() {
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

}  // namespace

EvalReport evaluate(const ConditionalModel& model, const Dataset& data, const EvalOptions& options) {
    EvalReport r;
    r.split = data.split;
    r.family = to_string(model.family());
    r.features = to_string(model.features());
    r.n = data.size();
    r.log2_probs = item_log2_probs(model, data);
    r.ell_bits = total_nll_bits(r.log2_probs, options.exclude_zero, &r.zero_probability_items);
    const std::size_t kept = r.n - r.zero_probability_items;
    r.perplexity = kept > 0 ? std::exp2(r.ell_bits / static_cast<double>(kept))
                            : std::numeric_limits<double>::quiet_NaN();
    r.k = count_params(model);
    r.aic = aic(r.ell_bits, static_cast<double>(r.k));
    r.beam_width = options.beam_width;
    if (options.compute_accuracy) {
        r.hits = top1_hits(model, data, options.beam_width);
        std::size_t h = 0;
        for (const auto x : r.hits) h += x;
        r.accuracy = r.n > 0 ? 100.0 * static_cast<double>(h) / static_cast<double>(r.n) : 0.0;
    }
    r.created = utc_now();
    return r;
}

nlohmann::json to_json(const EvalReport& r) {
    nlohmann::json log2 = nlohmann::json::array();
    for (const double v : r.log2_probs) {
        // JSON has no -inf; zero-probability items are stored as null
        log2.push_back(std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr));
    }
    return {
        {"schema", std::string(kEvalReportSchema)},
        {"split", r.split},
        {"model", {{"family", r.family}, {"features", r.features}}},
        {"n", r.n},
        {"perplexity", r.perplexity},
        {"ell_bits", r.ell_bits},
        {"k", r.k},
        {"aic", r.aic},
        {"accuracy", r.accuracy},
        {"beam_width", r.beam_width},
        {"zero_probability_items", r.zero_probability_items},
        {"created", r.created},
        {"items", {{"log2_prob", log2}, {"hit", r.hits}}},
    };
}

EvalReport eval_report_from_json(const nlohmann::json& j) {
    try {
        if (j.at("schema").get<std::string>() != kEvalReportSchema) {
            throw FormatError("unsupported eval report schema '" + j.at("schema").get<std::string>() + "'");
        }
        EvalReport r;
        r.split = j.at("split").get<std::string>();
        r.family = j.at("model").at("family").get<std::string>();
        r.features = j.at("model").at("features").get<std::string>();
        r.n = j.at("n").get<std::size_t>();
        r.perplexity = j.at("perplexity").is_null() ? std::nan("") : j.at("perplexity").get<double>();
        r.ell_bits = j.at("ell_bits").get<double>();
        r.k = j.at("k").get<std::int64_t>();
        r.aic = j.at("aic").get<double>();
        r.accuracy = j.at("accuracy").get<double>();
        r.beam_width = j.at("beam_width").get<int>();
        r.zero_probability_items = j.at("zero_probability_items").get<std::size_t>();
        r.created = j.at("created").get<std::string>();
        for (const auto& v : j.at("items").at("log2_prob")) {
            r.log2_probs.push_back(v.is_null() ? -std::numeric_limits<double>::infinity()
                                               : v.get<double>());
        }
        r.hits = j.at("items").at("hit").get<std::vector<std::uint8_t>>();
        if (r.log2_probs.size() != r.n || (!r.hits.empty() && r.hits.size() != r.n)) {
            throw FormatError("eval report item vectors do not match n");
        }
        return r;
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(std::string("malformed eval report: ") + e.what());
    }
}

void write_eval_report(const EvalReport& report, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw UsageError("cannot write report: " + path.string());
    out << to_json(report).dump(2) << '\n';
}

EvalReport read_eval_report(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw UsageError("cannot open report: " + path.string());
    try {
        return eval_report_from_json(nlohmann::json::parse(in));
    } catch (const nlohmann::json::parse_error& e) {
        throw FormatError("report " + path.string() + " is not valid JSON: " + e.what());
    }
}

}  // namespace colordesc
