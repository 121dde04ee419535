// Copyright (c) 2026, The colordesc Authors
// SPDX-License-Identifier: Apache-2.0
//
// Color/description corpus: parsing, tokenization, vocabulary and id encoding.
#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "colordesc/color.hpp"

namespace colordesc {

/// Lowercases ASCII letters and splits on runs of whitespace.
std::vector<std::string> tokenize(std::string_view raw);

/// Tokens joined by single spaces; the normalized form used for exact-match comparisons.
std::string join_tokens(std::span<const std::string> tokens);

struct Description {
    std::string raw;
    std::vector<std::string> tokens;

    static Description from_text(std::string_view raw);
    [[nodiscard]] std::string normalized() const { return join_tokens(tokens); }
};

struct Example {
    ColorHSV color;
    Description description;
};

struct Dataset {
    std::string split;
    std::vector<Example> items;

    [[nodiscard]] std::size_t size() const { return items.size(); }
    [[nodiscard]] bool empty() const { return items.empty(); }
};

/// Token <-> id bijection. Ids 0, 1, 2 are always <s>, </s>, <unk>.
class Vocabulary {
public:
    static constexpr int kStart = 0;
    static constexpr int kEnd = 1;
    static constexpr int kUnknown = 2;
    static constexpr std::string_view kStartToken = "<s>";
    static constexpr std::string_view kEndToken = "</s>";
    static constexpr std::string_view kUnknownToken = "<unk>";

    Vocabulary();

    /// Content tokens ordered by descending count, ties broken lexicographically.
    static Vocabulary build(const Dataset& train);

    /// Rebuilds from an id-ordered token list (as stored in checkpoints).
    static Vocabulary from_tokens(std::vector<std::string> id_to_token);

    [[nodiscard]] int size() const { return static_cast<int>(id_to_token_.size()); }
    [[nodiscard]] std::optional<int> find(std::string_view token) const;
    /// Id of token, or <unk>.
    [[nodiscard]] int id(std::string_view token) const;
    [[nodiscard]] const std::string& token(int id) const;
    [[nodiscard]] const std::vector<std::string>& tokens() const { return id_to_token_; }

    /// [<s>] + content ids + [</s>].
    [[nodiscard]] std::vector<int> encode(std::span<const std::string> tokens) const;
    [[nodiscard]] std::vector<int> encode(std::string_view raw) const;
    /// Inverse of encode: drops the sentinels.
    [[nodiscard]] std::vector<std::string> decode(std::span<const int> ids) const;

    friend bool operator==(const Vocabulary& a, const Vocabulary& b) {
        return a.id_to_token_ == b.id_to_token_;
    }

private:
    std::vector<std::string> id_to_token_;
    std::unordered_map<std::string, int> token_to_id_;
};

struct LoadReport {
    Dataset dataset;
    std::size_t skipped{0};
    char delimiter{','};
    bool had_header{false};
};

/// Reads a delimited file with columns h,s,v,description (or h,s,l,description
/// when space == hsl). Delimiter is a tab if the first line contains one, else a
/// comma. A header line is optional; when present it must name four columns in
/// the declared color space. The description is everything after the third
/// delimiter. HSL rows are converted to HSV. Unparseable rows are skipped and counted.
LoadReport load_corpus(const std::filesystem::path& path, ColorSpace space,
                       std::string split = "");

/// key=value file naming train/dev/test corpus paths (relative to the manifest)
/// and optionally color_space=hsv|hsl. At least one split must be named; asking
/// path_for for an absent split throws UsageError.
struct SplitManifest {
    std::filesystem::path train;
    std::filesystem::path dev;
    std::filesystem::path test;
    ColorSpace color_space{ColorSpace::hsv};

    static SplitManifest read(const std::filesystem::path& path);
    [[nodiscard]] std::filesystem::path path_for(std::string_view split) const;
};

/// Deterministic seeded subsample of n items (all items when n >= size).
Dataset subsample(const Dataset& data, std::size_t n, std::uint64_t seed);

}  // namespace colordesc
