// Copyright (c) 2026, The colordesc Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

namespace colordesc {

/// Hue in degrees [0, 360), saturation and value in percent [0, 100].
struct ColorHSV {
    double h{0.0};
    double s{0.0};
    double v{0.0};

    friend bool operator==(const ColorHSV&, const ColorHSV&) = default;
};

/// Hue in degrees [0, 360), saturation and lightness in percent [0, 100].
struct ColorHSL {
    double h{0.0};
    double s{0.0};
    double l{0.0};

    friend bool operator==(const ColorHSL&, const ColorHSL&) = default;
};

enum class ColorSpace { hsv, hsl };

/// Wraps hue into [0, 360). 360 (and any multiple) maps to 0.
double canonical_hue(double h);

/// Canonicalizes hue; throws UsageError when s or v is outside [0, 100] or non-finite.
ColorHSV canonicalize(ColorHSV c);
ColorHSL canonicalize(ColorHSL c);

ColorHSV hsl_to_hsv(const ColorHSL& c);
ColorHSL hsv_to_hsl(const ColorHSV& c);

}  // namespace colordesc
