// Copyright (c) 2026, The colordesc Authors
// SPDX-License-Identifier: Apache-2.0
#include "colordesc/denotation.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "colordesc/corpus.hpp"
#include "colordesc/errors.hpp"

namespace colordesc {

void GridSpec::validate() const {
    if (n_h < 1 || n_s < 1 || n_l < 1) {
        throw UsageError("grid dimensions must be positive, got " + to_string(*this));
    }
}

GridSpec parse_grid_spec(const std::string& text) {
    GridSpec g;
    char x1 = 0;
    char x2 = 0;
    std::string rest;
    std::istringstream in(text);
    if (!(in >> g.n_h >> x1 >> g.n_s >> x2 >> g.n_l) || x1 != 'x' || x2 != 'x' || (in >> rest)) {
        throw UsageError("grid must look like HxSxL, got '" + text + "'");
    }
    g.validate();
    return g;
}

std::string to_string(const GridSpec& g) {
    return std::to_string(g.n_h) + "x" + std::to_string(g.n_s) + "x" + std::to_string(g.n_l);
}

ProbField probability_field(const ConditionalModel& model, std::span<const std::string> tokens,
                            const GridSpec& grid) {
    grid.validate();
    model.check_encodable(tokens);
    ProbField field{grid, std::vector<double>(grid.size())};
    for (int i = 0; i < grid.n_h; ++i) {
        for (int j = 0; j < grid.n_s; ++j) {
            for (int k = 0; k < grid.n_l; ++k) {
                const ColorHSV c = hsl_to_hsv({grid.hue(i), grid.sat(j), grid.light(k)});
                field.at(i, j, k) = std::exp(model.log_prob(c, tokens));
            }
        }
    }
    return field;
}

namespace {

CrossSection make_section(SectionAxis axis, int width, int height,
                          const std::vector<double>& sums, double total) {
    CrossSection out{axis, width, height, std::vector<double>(sums.size())};
    // sums is indexed [col][lightness]; image rows run from high lightness down
    for (int col = 0; col < width; ++col) {
        for (int k = 0; k < height; ++k) {
            const double p = sums[static_cast<std::size_t>(col) * height + k] / total;
            const int row = height - 1 - k;
            out.values[static_cast<std::size_t>(row) * width + col] =
                p > 0.0 ? std::max(std::log(p), kLogFloor) : kLogFloor;
        }
    }
    return out;
}

}  // namespace

CrossSections cross_sections(const ProbField& field) {
    const GridSpec& g = field.grid;
    if (field.values.empty() || field.values.size() != g.size()) {
        throw UsageError("cross_sections: field is empty or does not match its grid");
    }
    std::vector<double> over_h(static_cast<std::size_t>(g.n_s) * g.n_l, 0.0);
    std::vector<double> over_s(static_cast<std::size_t>(g.n_h) * g.n_l, 0.0);
    double total = 0.0;
    for (int i = 0; i < g.n_h; ++i) {
        for (int j = 0; j < g.n_s; ++j) {
            for (int k = 0; k < g.n_l; ++k) {
                const double v = field.at(i, j, k);
                if (!(v >= 0.0) || !std::isfinite(v)) {
                    throw NumericError("probability field has a negative or non-finite value");
                }
                over_h[static_cast<std::size_t>(j) * g.n_l + k] += v;
                over_s[static_cast<std::size_t>(i) * g.n_l + k] += v;
                total += v;
            }
        }
    }
    if (!(total > 0.0)) throw NumericError("probability field is zero everywhere");
    return {make_section(SectionAxis::L, g.n_s, g.n_l, over_h, total),
            make_section(SectionAxis::R, g.n_h, g.n_l, over_s, total)};
}

GrayImage to_image(const CrossSection& section) {
    if (section.values.empty()) throw UsageError("cannot render an empty cross section");
    const auto [lo_it, hi_it] = std::minmax_element(section.values.begin(), section.values.end());
    const double lo = *lo_it;
    const double hi = *hi_it;
    if (!std::isfinite(lo) || !std::isfinite(hi)) {
        throw NumericError("cross section contains non-finite values");
    }
    GrayImage img{section.width, section.height, std::vector<std::uint8_t>(section.values.size())};
    if (hi == lo) {
        std::fill(img.pixels.begin(), img.pixels.end(), std::uint8_t{128});
        return img;
    }
    for (std::size_t n = 0; n < section.values.size(); ++n) {
        const double t = (section.values[n] - lo) / (hi - lo) * 255.0;
        img.pixels[n] = static_cast<std::uint8_t>(std::clamp(std::floor(t + 0.5), 0.0, 255.0));
    }
    return img;
}

std::string encode_pgm(const GrayImage& image) {
    std::string out = "P5\n" + std::to_string(image.width) + " " + std::to_string(image.height) +
                      "\n255\n";
    out.append(reinterpret_cast<const char*>(image.pixels.data()), image.pixels.size());
    return out;
}

void write_pgm(const GrayImage& image, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw UsageError("cannot write image: " + path.string());
    const std::string bytes = encode_pgm(image);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw UsageError("failed writing image: " + path.string());
}

std::string slug(const std::string& description) {
    std::string out;
    bool dash = false;
    for (const unsigned char ch : description) {
        if (std::isalnum(ch)) {
            if (dash && !out.empty()) out.push_back('-');
            dash = false;
            out.push_back(static_cast<char>(std::tolower(ch)));
        } else {
            dash = true;
        }
    }
    return out.empty() ? "description" : out;
}

std::vector<double> hue_profile(const CrossSection& right, double lightness) {
    if (right.axis != SectionAxis::R) throw UsageError("hue_profile needs the R cross section");
    const int k = std::clamp(static_cast<int>(std::floor(lightness / 100.0 * right.height)), 0,
                             right.height - 1);
    const int row = right.height - 1 - k;
    std::vector<double> out(static_cast<std::size_t>(right.width));
    for (int col = 0; col < right.width; ++col) out[col] = std::exp(right.at(row, col));
    return out;
}

PeakSummary circular_peaks(std::span<const double> profile, double min_prominence) {
    PeakSummary s;
    const int n = static_cast<int>(profile.size());
    if (n < 3) return s;
    auto at = [&](int i) { return profile[static_cast<std::size_t>(((i % n) + n) % n)]; };
    for (int i = 0; i < n; ++i) {
        if (at(i) <= at(i - 1)) continue;
        // plateau: walk right while equal, then require a drop
        int j = i;
        while (j - i < n && at(j + 1) == at(i)) ++j;
        if (at(j + 1) < at(i)) s.maxima.push_back(i);
    }
    if (min_prominence > 0.0 && s.maxima.size() >= 2) {
        // discard maxima that do not rise min_prominence above the deepest point
        // separating them from a higher neighbor peak
        std::vector<int> kept;
        for (const int m : s.maxima) {
            double left_min = at(m);
            double right_min = at(m);
            bool higher_left = false;
            bool higher_right = false;
            for (int d = 1; d < n && !higher_right; ++d) {
                if (at(m + d) > at(m)) higher_right = true;
                else right_min = std::min(right_min, at(m + d));
            }
            for (int d = 1; d < n && !higher_left; ++d) {
                if (at(m - d) > at(m)) higher_left = true;
                else left_min = std::min(left_min, at(m - d));
            }
            const double base = (higher_left || higher_right)
                                    ? std::max(higher_left ? left_min : -1e300,
                                               higher_right ? right_min : -1e300)
                                    : -1e300;
            if (at(m) - base >= min_prominence) kept.push_back(m);
        }
        s.maxima = kept;
    }
    if (s.maxima.size() >= 2) {
        std::vector<int> order = s.maxima;
        std::sort(order.begin(), order.end(), [&](int a, int b) { return at(a) > at(b); });
        int a = std::min(order[0], order[1]);
        int b = std::max(order[0], order[1]);
        if (b - a > n - (b - a)) std::swap(a, b);  // walk the shorter arc from a to b
        int span = ((b - a) % n + n) % n;
        int best = a;
        for (int d = 0; d <= span; ++d) {
            const int idx = ((a + d) % n + n) % n;
            if (at(idx) < at(best)) best = idx;
        }
        s.interior_minimum = best;
    }
    return s;
}

DenotationOutput write_denotation(const ConditionalModel& model, const std::string& description,
                                  const GridSpec& grid, const std::filesystem::path& outdir,
                                  const nlohmann::json& extra_meta) {
    const auto tokens = tokenize(description);
    if (tokens.empty()) throw UsageError("--desc is empty");
    const ProbField field = probability_field(model, tokens, grid);
    DenotationOutput out;
    out.sections = cross_sections(field);
    std::error_code ec;
    std::filesystem::create_directories(outdir, ec);
    if (ec) throw UsageError("cannot create output directory " + outdir.string() + ": " + ec.message());
    const std::string base = slug(description);
    out.left = outdir / (base + "-L.pgm");
    out.right = outdir / (base + "-R.pgm");
    out.meta = outdir / (base + "-meta.json");
    write_pgm(to_image(out.sections.left), out.left);
    write_pgm(to_image(out.sections.right), out.right);

    const auto profile = hue_profile(out.sections.right);
    const auto peaks = circular_peaks(profile);
    nlohmann::json meta = {
        {"description", description},
        {"tokens", tokens},
        {"grid", {{"n_h", grid.n_h}, {"n_s", grid.n_s}, {"n_l", grid.n_l}, {"spec", to_string(grid)},
                  {"space", "hsl"}, {"sampling", "cell-centers"}}},
        {"log_floor", kLogFloor},
        {"left", {{"file", out.left.filename().string()}, {"axes", "x=saturation, y=lightness (top=100)"},
                  {"min", *std::min_element(out.sections.left.values.begin(), out.sections.left.values.end())},
                  {"max", *std::max_element(out.sections.left.values.begin(), out.sections.left.values.end())}}},
        {"right", {{"file", out.right.filename().string()}, {"axes", "x=hue, y=lightness (top=100)"},
                   {"min", *std::min_element(out.sections.right.values.begin(), out.sections.right.values.end())},
                   {"max", *std::max_element(out.sections.right.values.begin(), out.sections.right.values.end())}}},
        {"hue_profile_maxima", peaks.maxima},
        {"hue_profile_interior_minimum", peaks.interior_minimum},
    };
    for (const auto& [key, value] : extra_meta.items()) meta[key] = value;
    std::ofstream m(out.meta, std::ios::trunc);
    if (!m) throw UsageError("cannot write " + out.meta.string());
    m << meta.dump(2) << '\n';
    return out;
}

}  // namespace colordesc
