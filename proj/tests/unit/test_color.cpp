// Copyright (c) 2026, The colordesc Authors
// SPDX-License-Identifier: Apache-2.0
#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <array>
#include <cmath>

#include "colordesc/color.hpp"
#include "colordesc/errors.hpp"
#include "colordesc/kernel/rng.hpp"

using namespace colordesc;
using Catch::Approx;

namespace {

// Oracle through RGB: HSL -> RGB by the sector formula, then RGB -> HSV.
std::array<double, 3> hsl_to_rgb(double h, double s, double l) {
    s /= 100.0;
    l /= 100.0;
    const double c = (1 - std::abs(2 * l - 1)) * s;
    const double hp = h / 60.0;
    const double x = c * (1 - std::abs(std::fmod(hp, 2.0) - 1));
    double r = 0, g = 0, b = 0;
    if (hp < 1) r = c, g = x;
    else if (hp < 2) r = x, g = c;
    else if (hp < 3) g = c, b = x;
    else if (hp < 4) g = x, b = c;
    else if (hp < 5) r = x, b = c;
    else r = c, b = x;
    const double m = l - c / 2;
    return {r + m, g + m, b + m};
}

std::array<double, 2> rgb_to_sv(const std::array<double, 3>& rgb) {
    const double mx = std::max({rgb[0], rgb[1], rgb[2]});
    const double mn = std::min({rgb[0], rgb[1], rgb[2]});
    return {mx == 0 ? 0.0 : 100.0 * (mx - mn) / mx, 100.0 * mx};
}

}  // namespace

TEST_CASE("HSL to HSV known points") {
    const auto a = hsl_to_hsv({120, 100, 50});
    CHECK(a.h == 120);
    CHECK(a.s == Approx(100).margin(1e-12));
    CHECK(a.v == Approx(100).margin(1e-12));
    for (const double h : {0.0, 77.0, 300.0})
        for (const double l : {0.0, 10.0, 50.0, 100.0}) {
            const auto g = hsl_to_hsv({h, 0, l});
            CHECK(g.h == h);
            CHECK(g.s == 0);
            CHECK(g.v == Approx(l).margin(1e-12));
        }
}

TEST_CASE("HSL to HSV agrees with the RGB oracle") {
    Rng rng(8);
    for (int t = 0; t < 2000; ++t) {
        const double h = rng.uniform(0, 360), s = rng.uniform(0, 100), l = rng.uniform(0, 100);
        const auto got = hsl_to_hsv({h, s, l});
        const auto sv = rgb_to_sv(hsl_to_rgb(h, s, l));
        REQUIRE(got.h == h);
        REQUIRE(got.s == Approx(sv[0]).margin(1e-9));
        REQUIRE(got.v == Approx(sv[1]).margin(1e-9));
    }
}

TEST_CASE("HSV/HSL roundtrip within 1e-9 where defined") {
    Rng rng(9);
    for (int t = 0; t < 5000; ++t) {
        const ColorHSL c{rng.uniform(0, 360), rng.uniform(0.01, 100), rng.uniform(0.01, 99.99)};
        const auto back = hsv_to_hsl(hsl_to_hsv(c));
        REQUIRE(back.h == c.h);
        REQUIRE(back.s == Approx(c.s).margin(1e-9));
        REQUIRE(back.l == Approx(c.l).margin(1e-9));
    }
}

TEST_CASE("canonicalization wraps hue and rejects out-of-range channels") {
    CHECK(canonical_hue(360.0) == 0.0);
    CHECK(canonical_hue(-90.0) == 270.0);
    CHECK(canonical_hue(725.0) == Approx(5.0));
    CHECK(canonicalize(ColorHSV{360, 50, 50}) == ColorHSV{0, 50, 50});
    CHECK_THROWS_AS(canonicalize(ColorHSV{10, 101, 50}), UsageError);
    CHECK_THROWS_AS(canonicalize(ColorHSL{10, 50, -1}), UsageError);
}
