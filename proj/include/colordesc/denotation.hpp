// Copyright (c) 2026, The colordesc Authors
// SPDX-License-Identifier: Apache-2.0
//
// Cross sections of S(d|c) over an HSL grid, rendered as grayscale PGM.
//
//   L(s,l) = log( sum_h S / sum S )     R(h,l) = log( sum_s S / sum S )
#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

#include "colordesc/color.hpp"
#include "colordesc/models/model.hpp"

namespace colordesc {

/// Log floor applied to empty marginal cells before rendering.
inline const double kLogFloor = -69.07755278982137;  // log(1e-30)

struct GridSpec {
    int n_h{120};
    int n_s{50};
    int n_l{50};

    [[nodiscard]] std::size_t size() const {
        return static_cast<std::size_t>(n_h) * n_s * n_l;
    }
    /// Cell centers; hue samples are periodic so 360 is never visited.
    [[nodiscard]] double hue(int i) const { return (i + 0.5) * 360.0 / n_h; }
    [[nodiscard]] double sat(int j) const { return (j + 0.5) * 100.0 / n_s; }
    [[nodiscard]] double light(int k) const { return (k + 0.5) * 100.0 / n_l; }
    void validate() const;
};

GridSpec parse_grid_spec(const std::string& text);  // "HxSxL"
std::string to_string(const GridSpec& grid);

struct ProbField {
    GridSpec grid;
    std::vector<double> values;  // index (i*n_s + j)*n_l + k

    [[nodiscard]] double at(int i, int j, int k) const {
        return values[(static_cast<std::size_t>(i) * grid.n_s + j) * grid.n_l + k];
    }
    double& at(int i, int j, int k) {
        return values[(static_cast<std::size_t>(i) * grid.n_s + j) * grid.n_l + k];
    }
};

/// Evaluates exp(log_prob) at every grid point in (h, s, l) order.
ProbField probability_field(const ConditionalModel& model, std::span<const std::string> tokens,
                            const GridSpec& grid);

enum class SectionAxis { L, R };

/// width = n_s (L) or n_h (R); height = n_l. Row r is lightness index n_l-1-r.
struct CrossSection {
    SectionAxis axis{SectionAxis::L};
    int width{0};
    int height{0};
    std::vector<double> values;  // row-major, finite

    [[nodiscard]] double at(int row, int col) const {
        return values[static_cast<std::size_t>(row) * width + col];
    }
};

struct CrossSections {
    CrossSection left;
    CrossSection right;
};

CrossSections cross_sections(const ProbField& field);

struct GrayImage {
    int width{0};
    int height{0};
    std::vector<std::uint8_t> pixels;
};

/// min -> 0, max -> 255, linear with round-half-up; constant input -> 128.
GrayImage to_image(const CrossSection& section);
std::string encode_pgm(const GrayImage& image);
void write_pgm(const GrayImage& image, const std::filesystem::path& path);

/// Lowercase, runs of non-alphanumerics become '-'.
std::string slug(const std::string& description);

/// exp of the R section's lightness row nearest to l = 50, as a function of hue.
std::vector<double> hue_profile(const CrossSection& right, double lightness = 50.0);

struct PeakSummary {
    std::vector<int> maxima;  // hue indices of circular strict local maxima
    int interior_minimum{-1}; // lowest point on the shorter arc between the two largest maxima
};

PeakSummary circular_peaks(std::span<const double> profile, double min_prominence = 0.0);

struct DenotationOutput {
    std::filesystem::path left;
    std::filesystem::path right;
    std::filesystem::path meta;
    CrossSections sections;
};

/// Writes <slug>-L.pgm, <slug>-R.pgm and <slug>-meta.json into outdir.
DenotationOutput write_denotation(const ConditionalModel& model, const std::string& description,
                                  const GridSpec& grid, const std::filesystem::path& outdir,
                                  const nlohmann::json& extra_meta = nlohmann::json::object());

}  // namespace colordesc
