// Copyright (c) 2026, The colordesc Authors
// SPDX-License-Identifier: Apache-2.0
//
// Color featurizers: raw scaled HSV, multi-resolution buckets, and the
// 54-dimensional Fourier basis.
#pragma once

#include <array>
#include <string>
#include <string_view>
#include <vector>

#include "colordesc/color.hpp"

namespace colordesc {

enum class FeatureScheme { raw, buckets, fourier };

std::string to_string(FeatureScheme scheme);
FeatureScheme parse_feature_scheme(std::string_view name);

inline constexpr int kRawDim = 3;
inline constexpr int kFourierDim = 54;
inline constexpr int kFourierTerms = 27;

/// Bucket grid at one resolution: hue x saturation x value cells.
struct BucketGrid {
    int hue_cells;
    int sat_cells;
    int val_cells;

    [[nodiscard]] constexpr int size() const { return hue_cells * sat_cells * val_cells; }
};

inline constexpr BucketGrid kCoarseGrid{90, 10, 10};
inline constexpr BucketGrid kMidGrid{45, 5, 5};
inline constexpr BucketGrid kGlobalGrid{1, 1, 1};

struct BucketIndex {
    int coarse{0};
    int mid{0};
    int global{0};

    friend bool operator==(const BucketIndex&, const BucketIndex&) = default;
};

/// Row-major flattened cell id of c within grid. s = 100 and v = 100 fall in the last cell.
int bucket_cell(const ColorHSV& c, const BucketGrid& grid);
BucketIndex bucket_index(const ColorHSV& c);

/// (h/360, s/100, v/100).
std::array<double, kRawDim> raw_features(const ColorHSV& c);

/// Real parts of exp[-2*pi*i*(j*h/360 + k*s/200 + l*v/200)] for j,k,l in {0,1,2}
/// (j outermost, l innermost), followed by the 27 imaginary parts.
std::array<double, kFourierDim> fourier_features(const ColorHSV& c);

/// Model input for one color. Dense schemes fill `values`; the bucket scheme
/// fills `buckets` and leaves `values` empty (the model owns the embeddings).
struct FeatureVector {
    FeatureScheme scheme{FeatureScheme::fourier};
    std::vector<double> values;
    BucketIndex buckets;
};

FeatureVector featurize(FeatureScheme scheme, const ColorHSV& c);

/// Width of the dense feature block a model sees: 3, 54, or the concatenated
/// bucket embedding width.
int feature_dim(FeatureScheme scheme, int bucket_embedding_dim);

}  // namespace colordesc
