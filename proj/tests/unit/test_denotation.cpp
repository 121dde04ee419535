// Copyright (c) 2026, The colordesc Authors
// SPDX-License-Identifier: Apache-2.0
#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "colordesc/denotation.hpp"
#include "colordesc/errors.hpp"
#include "colordesc/models/histogram.hpp"
#include "test_support.hpp"

using namespace colordesc;
using namespace colordesc::testing;
using Catch::Approx;

namespace {

ProbField field_2x2x2(const std::array<double, 8>& v) {
    ProbField f{GridSpec{2, 2, 2}, std::vector<double>(v.begin(), v.end())};
    return f;
}

CrossSection section(std::vector<double> v) {
    CrossSection s;
    s.width = static_cast<int>(v.size());
    s.height = 1;
    s.values = std::move(v);
    return s;
}

}  // namespace

TEST_CASE("grid spec parsing and cell centers") {
    const auto g = parse_grid_spec("120x50x50");
    CHECK(g.size() == 300000);
    CHECK(g.hue(0) == 1.5);
    CHECK(g.sat(49) == 99.0);
    CHECK(to_string(g) == "120x50x50");
    CHECK_THROWS_AS(parse_grid_spec("12x5"), UsageError);
    CHECK_THROWS_AS(parse_grid_spec("0x5x5"), UsageError);
}

TEST_CASE("probability field of a uniform model is constant") {
    const HistogramModel hm(DescriptionInventory::from_list({"red", "blue"}));
    const auto f = probability_field(hm, std::vector<std::string>{"red"}, GridSpec{2, 2, 2});
    REQUIRE(f.values.size() == 8);
    for (const double v : f.values) CHECK(v == Approx(0.5).epsilon(1e-15));
    CHECK_THROWS_AS(probability_field(hm, std::vector<std::string>{"green"}, GridSpec{2, 2, 2}),
                    UsageError);
}

TEST_CASE("probability field spot values equal exp(score) at HSL cell centers") {
    HistogramModel hm(DescriptionInventory::from_list({"red", "blue"}));
    Rng rng(1);
    for (int i = 0; i < 300; ++i) hm.add(random_color(rng), static_cast<int>(rng.below(2)));
    const GridSpec g{4, 3, 5};
    const std::vector<std::string> d{"blue"};
    const auto f = probability_field(hm, d, g);
    for (const auto [i, j, k] : {std::tuple{0, 0, 0}, std::tuple{3, 2, 4}, std::tuple{1, 1, 2}}) {
        const auto c = hsl_to_hsv({g.hue(i), g.sat(j), g.light(k)});
        CHECK(f.at(i, j, k) == std::exp(hm.log_prob(c, d)));
    }
}

TEST_CASE("constant field gives uniform marginals") {
    const auto cs = cross_sections(field_2x2x2({1, 1, 1, 1, 1, 1, 1, 1}));
    for (const double v : cs.left.values) CHECK(v == Approx(std::log(0.25)));
    for (const double v : cs.right.values) CHECK(v == Approx(std::log(0.25)));
}

TEST_CASE("point-mass field has one finite cell") {
    std::array<double, 8> v{};
    v[(1 * 2 + 0) * 2 + 1] = 3.0;  // h=1, s=0, l=1
    const auto cs = cross_sections(field_2x2x2(v));
    // L: width s, height l, top row is l index 1
    CHECK(cs.left.at(0, 0) == 0.0);
    CHECK(cs.left.at(0, 1) == kLogFloor);
    CHECK(cs.left.at(1, 0) == kLogFloor);
    CHECK(cs.right.at(0, 1) == 0.0);
    CHECK(cs.right.at(1, 1) == kLogFloor);
}

TEST_CASE("hand-built field marginals match hand summation") {
    // index (h, s, l) -> value
    const std::array<double, 8> v{1, 2, 3, 4, 5, 6, 7, 8};
    const auto cs = cross_sections(field_2x2x2(v));
    const double total = 36;
    // L(s, l) = sum over h of v[h][s][l]
    const double L00 = 1 + 5, L01 = 2 + 6, L10 = 3 + 7, L11 = 4 + 8;
    CHECK(cs.left.at(1, 0) == std::log(L00 / total));
    CHECK(cs.left.at(0, 0) == std::log(L01 / total));
    CHECK(cs.left.at(1, 1) == std::log(L10 / total));
    CHECK(cs.left.at(0, 1) == std::log(L11 / total));
    // R(h, l) = sum over s of v[h][s][l]
    const double R00 = 1 + 3, R01 = 2 + 4, R10 = 5 + 7, R11 = 6 + 8;
    CHECK(cs.right.at(1, 0) == std::log(R00 / total));
    CHECK(cs.right.at(0, 0) == std::log(R01 / total));
    CHECK(cs.right.at(1, 1) == std::log(R10 / total));
    CHECK(cs.right.at(0, 1) == std::log(R11 / total));
}

TEST_CASE("marginals sum to one for random fields") {
    Rng rng(3);
    for (int t = 0; t < 50; ++t) {
        const GridSpec g{1 + int(rng.below(6)), 1 + int(rng.below(6)), 1 + int(rng.below(6))};
        ProbField f{g, std::vector<double>(g.size())};
        for (auto& v : f.values) v = rng.uniform(0.0, 1.0);
        const auto cs = cross_sections(f);
        double sl = 0, sr = 0;
        for (const double v : cs.left.values) sl += std::exp(v);
        for (const double v : cs.right.values) sr += std::exp(v);
        REQUIRE(sl == Approx(1.0).margin(1e-9));
        REQUIRE(sr == Approx(1.0).margin(1e-9));
    }
    ProbField zero{GridSpec{2, 2, 2}, std::vector<double>(8, 0.0)};
    CHECK_THROWS_AS(cross_sections(zero), NumericError);
}

TEST_CASE("rendering endpoints, rounding and degenerate case") {
    CHECK(to_image(section({0.0, -1.0})).pixels == std::vector<std::uint8_t>{255, 0});
    CHECK(to_image(section({0.0, -1.0, -2.0})).pixels == std::vector<std::uint8_t>{255, 128, 0});
    CHECK(to_image(section({-3.0, -3.0, -3.0})).pixels == std::vector<std::uint8_t>{128, 128, 128});
}

TEST_CASE("PGM golden bytes for the hand-built field") {
    const std::array<double, 8> v{1, 2, 3, 4, 5, 6, 7, 8};
    const auto cs = cross_sections(field_2x2x2(v));
    const std::string header = "P5\n2 2\n255\n";
    // bytes evaluated offline as floor((x - min) / (max - min) * 255 + 0.5)
    // L rows (top = high lightness): [log 8/36, log 12/36], [log 6/36, log 10/36]
    const std::string left = header + std::string("\x6a\xff\x00\xbc", 4);
    // R rows: [log 6/36, log 14/36], [log 4/36, log 12/36]
    const std::string right = header + std::string("\x53\xff\x00\xe0", 4);
    CHECK(encode_pgm(to_image(cs.left)) == left);
    CHECK(encode_pgm(to_image(cs.right)) == right);
}

TEST_CASE("rendering is invariant to a constant log shift") {
    Rng rng(8);
    for (int t = 0; t < 100; ++t) {
        std::vector<double> v(30), w(30);
        const double shift = rng.uniform(-20, 20);
        for (std::size_t i = 0; i < v.size(); ++i) {
            v[i] = std::log(rng.uniform(0.01, 1.0));
            w[i] = v[i] + shift;
        }
        auto a = section(v), b = section(w);
        REQUIRE(encode_pgm(to_image(a)) == encode_pgm(to_image(b)));
    }
}

TEST_CASE("slugs and circular peak counting") {
    CHECK(slug("greenish") == "greenish");
    CHECK(slug("Light  Blue!") == "light-blue");
    CHECK(slug("???") == "description");

    const std::vector<double> bimodal{1, 3, 1, 0.5, 1, 4, 2, 1};
    const auto p = circular_peaks(bimodal);
    CHECK(p.maxima == std::vector<int>{1, 5});
    CHECK(p.interior_minimum == 3);
    // wraps around the hue circle
    const std::vector<double> wrap{5, 1, 1, 1, 1, 4};
    CHECK(circular_peaks(wrap).maxima == std::vector<int>{0});
    CHECK(circular_peaks(std::vector<double>(10, 1.0)).maxima.empty());
    const std::vector<double> plateau{1, 2, 2, 1, 0, 0};
    CHECK(circular_peaks(plateau).maxima == std::vector<int>{1});
}

TEST_CASE("write_denotation produces the two images and a sidecar") {
    HistogramModel hm(DescriptionInventory::from_list({"greenish", "red"}));
    Rng rng(1);
    for (int i = 0; i < 200; ++i) hm.add(random_color(rng), static_cast<int>(rng.below(2)));
    TempDir dir;
    const auto out = write_denotation(hm, "greenish", GridSpec{12, 5, 5}, dir.path(), {{"extra", 1}});
    CHECK(out.left.filename() == "greenish-L.pgm");
    CHECK(out.right.filename() == "greenish-R.pgm");
    CHECK(read_bytes(out.left).substr(0, 11) == "P5\n5 5\n255\n");
    CHECK(read_bytes(out.right).substr(0, 12) == "P5\n12 5\n255\n");
    const auto meta = nlohmann::json::parse(read_bytes(out.meta));
    CHECK(meta.at("grid").at("spec") == "12x5x5");
    CHECK(meta.at("extra") == 1);
    CHECK_THROWS_AS(write_denotation(hm, "purple", GridSpec{2, 2, 2}, dir.path()), UsageError);
}
