// Copyright (c) 2026, The colordesc Authors
// SPDX-License-Identifier: Apache-2.0
#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "colordesc/errors.hpp"
#include "colordesc/evaluation.hpp"
#include "colordesc/models/histogram.hpp"
#include "test_support.hpp"

using namespace colordesc;
using namespace colordesc::testing;
using Catch::Approx;

namespace {

/// Exact two-sided p over all 2^n sign patterns (no +1 correction).
double exact_permutation_p(const std::vector<double>& a, const std::vector<double>& b) {
    const std::size_t n = a.size();
    double observed = 0;
    for (std::size_t i = 0; i < n; ++i) observed += a[i] - b[i];
    observed = std::abs(observed / n);
    std::size_t hits = 0;
    for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
        double s = 0;
        for (std::size_t i = 0; i < n; ++i) s += ((mask >> i) & 1u) ? b[i] - a[i] : a[i] - b[i];
        if (std::abs(s / n) >= observed - 1e-12) ++hits;
    }
    return static_cast<double>(hits) / static_cast<double>(1u << n);
}

}  // namespace

TEST_CASE("perplexity is the geometric mean of reciprocal probabilities") {
    const std::vector<double> halves{-1.0, -1.0};
    CHECK(perplexity_from_log2(halves) == 2.0);
    const std::vector<double> mixed{-1.0, -3.0};
    CHECK(perplexity_from_log2(mixed) == 4.0);
    CHECK(total_nll_bits(mixed) == 4.0);
}

TEST_CASE("zero-probability items fail loudly unless excluded") {
    const std::vector<double> lp{-1.0, -INFINITY, -3.0};
    CHECK_THROWS_AS(perplexity_from_log2(lp), NumericError);
    std::size_t zeros = 0;
    CHECK(total_nll_bits(lp, true, &zeros) == 4.0);
    CHECK(zeros == 1);
    CHECK(perplexity_from_log2(lp, true) == 4.0);
}

TEST_CASE("aic arithmetic and monotonicity") {
    CHECK(aic(1000, 50) == 2100);
    CHECK(aic(0, 0) == 0);
    Rng rng(1);
    for (int t = 0; t < 1000; ++t) {
        const double l = rng.uniform(0, 1e6), k = rng.uniform(0, 1e5), d = rng.uniform(0.1, 10);
        REQUIRE(aic(l + d, k) > aic(l, k));
        REQUIRE(aic(l, k + d) > aic(l, k));
    }
}

TEST_CASE("uniform model over two descriptions has perplexity two") {
    const HistogramModel hm(DescriptionInventory::from_list({"red", "blue"}));
    const auto data = make_dataset({{10, 10, 10, "red"}, {200, 50, 50, "blue"}}, "dev");
    CHECK(perplexity(hm, data) == Approx(2.0).epsilon(1e-15));
    const auto r = evaluate(hm, data, {});
    CHECK(r.perplexity == Approx(2.0).epsilon(1e-15));
    CHECK(r.ell_bits == Approx(2.0).epsilon(1e-15));
    CHECK(r.aic == Approx(2 * r.ell_bits + 2 * r.k));
    CHECK(std::exp2(r.ell_bits / r.n) == Approx(r.perplexity).epsilon(1e-15));
}

TEST_CASE("accuracy counts exact top-1 matches") {
    HistogramModel hm(DescriptionInventory::from_list({"a", "b", "c"}));
    for (int i = 0; i < 5; ++i) hm.add({100, 50, 50}, 0);
    Dataset data;
    for (int i = 0; i < 10; ++i) {
        data.items.push_back({{double(i * 30), 40, 40}, Description::from_text(i < 3 ? "a" : "b")});
    }
    CHECK(accuracy(hm, data, 1) == Approx(30.0));
    // invariant to order
    std::reverse(data.items.begin(), data.items.end());
    CHECK(accuracy(hm, data, 1) == Approx(30.0));
    const auto r = evaluate(hm, data, {});
    double mean = 0;
    for (const auto h : r.hits) mean += h;
    CHECK(100.0 * mean / r.n == Approx(r.accuracy));
}

TEST_CASE("permutation test: identical inputs give p = 1") {
    const std::vector<double> a{1, 2, 3, 4, 5};
    CHECK(permutation_test(a, a, 1000, 1) == 1.0);
}

TEST_CASE("permutation test: large shift is significant") {
    Rng rng(4);
    std::vector<double> b(1000), a(1000);
    for (std::size_t i = 0; i < b.size(); ++i) {
        b[i] = rng.normal();
        a[i] = b[i] + 5.0;
    }
    CHECK(permutation_test(a, b, 10000, 3) <= 0.001);
}

TEST_CASE("permutation test approximates exact enumeration") {
    Rng rng(99);
    for (int trial = 0; trial < 8; ++trial) {
        std::vector<double> a(10), b(10);
        for (int i = 0; i < 10; ++i) {
            a[i] = rng.normal(0.3 * trial / 8.0, 1.0);
            b[i] = rng.normal();
        }
        const double exact = exact_permutation_p(a, b);
        const double approx = permutation_test(a, b, 10000, 7 + trial);
        INFO("exact=" << exact << " approx=" << approx);
        CHECK(std::abs(exact - approx) <= 0.02);
    }
}

TEST_CASE("permutation test is symmetric and validates input") {
    Rng rng(5);
    std::vector<double> a(50), b(50);
    for (int i = 0; i < 50; ++i) {
        a[i] = rng.normal();
        b[i] = rng.normal(0.2, 1.0);
    }
    CHECK(permutation_test(a, b, 2000, 11) == permutation_test(b, a, 2000, 11));
    CHECK_THROWS_AS(permutation_test(a, std::vector<double>(49), 100, 1), UsageError);
    CHECK_THROWS_AS(permutation_test(a, b, 0, 1), UsageError);
}

TEST_CASE("eval report JSON roundtrip") {
    EvalReport r;
    r.split = "dev";
    r.family = "rnn";
    r.features = "fourier";
    r.n = 3;
    r.log2_probs = {-1.5, -INFINITY, -0.25};
    r.hits = {1, 0, 1};
    r.perplexity = 2.5;
    r.ell_bits = 1.75;
    r.k = 1234;
    r.aic = 2 * 1.75 + 2 * 1234;
    r.accuracy = 66.6;
    r.beam_width = 10;
    r.zero_probability_items = 1;
    r.created = "2026-01-01T00:00:00Z";
    TempDir dir;
    write_eval_report(r, dir / "r.json");
    const auto back = read_eval_report(dir / "r.json");
    CHECK(back.log2_probs[0] == -1.5);
    CHECK(std::isinf(back.log2_probs[1]));
    CHECK(back.hits == r.hits);
    CHECK(back.k == 1234);
    CHECK(back.aic == r.aic);
    CHECK(to_json(back) == to_json(r));

    write_text(dir / "bad.json", R"({"schema": "other/1"})");
    CHECK_THROWS_AS(read_eval_report(dir / "bad.json"), FormatError);
    write_text(dir / "junk.json", "not json");
    CHECK_THROWS_AS(read_eval_report(dir / "junk.json"), FormatError);
}
