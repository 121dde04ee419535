// Copyright (c) 2026, The colordesc Authors
// SPDX-License-Identifier: Apache-2.0
#include "colordesc/features.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "colordesc/errors.hpp"

namespace colordesc {

std::string to_string(FeatureScheme scheme) {
    switch (scheme) {
        case FeatureScheme::raw:
            return "raw";
        case FeatureScheme::buckets:
            return "buckets";
        case FeatureScheme::fourier:
            return "fourier";
    }
    return "?";
}

FeatureScheme parse_feature_scheme(std::string_view name) {
    if (name == "raw") return FeatureScheme::raw;
    if (name == "buckets") return FeatureScheme::buckets;
    if (name == "fourier") return FeatureScheme::fourier;
    throw UsageError("unknown feature scheme '" + std::string(name) + "' (raw|buckets|fourier)");
}

namespace {

int cell(double x, double extent, int cells) {
    const int i = static_cast<int>(std::floor(x / extent * cells));
    return std::clamp(i, 0, cells - 1);
}

}  // namespace

int bucket_cell(const ColorHSV& c, const BucketGrid& grid) {
    const int hi = cell(c.h, 360.0, grid.hue_cells);
    const int si = cell(c.s, 100.0, grid.sat_cells);
    const int vi = cell(c.v, 100.0, grid.val_cells);
    return (hi * grid.sat_cells + si) * grid.val_cells + vi;
}

BucketIndex bucket_index(const ColorHSV& c) {
    return BucketIndex{bucket_cell(c, kCoarseGrid), bucket_cell(c, kMidGrid),
                       bucket_cell(c, kGlobalGrid)};
}

std::array<double, kRawDim> raw_features(const ColorHSV& c) {
    return {c.h / 360.0, c.s / 100.0, c.v / 100.0};
}

std::array<double, kFourierDim> fourier_features(const ColorHSV& c) {
    const double hs = c.h / 360.0;
    const double ss = c.s / 200.0;
    const double vs = c.v / 200.0;
    std::array<double, kFourierDim> f{};
    int n = 0;
    for (int j = 0; j < 3; ++j) {
        for (int k = 0; k < 3; ++k) {
            for (int l = 0; l < 3; ++l) {
                const double theta = -2.0 * std::numbers::pi * (j * hs + k * ss + l * vs);
                f[n] = std::cos(theta);
                f[n + kFourierTerms] = std::sin(theta);
                ++n;
            }
        }
    }
    return f;
}

FeatureVector featurize(FeatureScheme scheme, const ColorHSV& c) {
    FeatureVector out;
    out.scheme = scheme;
    switch (scheme) {
        case FeatureScheme::raw: {
            const auto r = raw_features(c);
            out.values.assign(r.begin(), r.end());
            break;
        }
        case FeatureScheme::fourier: {
            const auto f = fourier_features(c);
            out.values.assign(f.begin(), f.end());
            break;
        }
        case FeatureScheme::buckets:
            out.buckets = bucket_index(c);
            break;
    }
    return out;
}

int feature_dim(FeatureScheme scheme, int bucket_embedding_dim) {
    switch (scheme) {
        case FeatureScheme::raw:
            return kRawDim;
        case FeatureScheme::fourier:
            return kFourierDim;
        case FeatureScheme::buckets:
            return 3 * bucket_embedding_dim;
    }
    return 0;
}

}  // namespace colordesc
