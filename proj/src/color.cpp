// Copyright (c) 2026, The colordesc Authors
// SPDX-License-Identifier: Apache-2.0
#include "colordesc/color.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "colordesc/errors.hpp"

namespace colordesc {

namespace {

void check_percent(double x, const char* channel) {
    if (!std::isfinite(x) || x < 0.0 || x > 100.0) {
        throw UsageError(std::string("color channel ") + channel + " out of range [0,100]: " +
                         std::to_string(x));
    }
}

}  // namespace

double canonical_hue(double h) {
    if (!std::isfinite(h)) {
        throw UsageError("non-finite hue");
    }
    double w = std::fmod(h, 360.0);
    if (w < 0.0) {
        w += 360.0;
    }
    // fmod of a tiny negative number can round back up to exactly 360
    if (w >= 360.0) {
        w = 0.0;
    }
    return w;
}

ColorHSV canonicalize(ColorHSV c) {
    check_percent(c.s, "s");
    check_percent(c.v, "v");
    c.h = canonical_hue(c.h);
    return c;
}

ColorHSL canonicalize(ColorHSL c) {
    check_percent(c.s, "s");
    check_percent(c.l, "l");
    c.h = canonical_hue(c.h);
    return c;
}

ColorHSV hsl_to_hsv(const ColorHSL& c) {
    const double s = c.s / 100.0;
    const double l = c.l / 100.0;
    const double v = l + s * std::min(l, 1.0 - l);
    const double sv = v > 0.0 ? 2.0 * (1.0 - l / v) : 0.0;
    return ColorHSV{c.h, std::clamp(sv, 0.0, 1.0) * 100.0, std::clamp(v, 0.0, 1.0) * 100.0};
}

ColorHSL hsv_to_hsl(const ColorHSV& c) {
    const double s = c.s / 100.0;
    const double v = c.v / 100.0;
    const double l = v * (1.0 - s / 2.0);
    const double denom = std::min(l, 1.0 - l);
    const double sl = denom > 0.0 ? (v - l) / denom : 0.0;
    return ColorHSL{c.h, std::clamp(sl, 0.0, 1.0) * 100.0, std::clamp(l, 0.0, 1.0) * 100.0};
}

}  // namespace colordesc
