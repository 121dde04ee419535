// Copyright (c) 2026, The colordesc Authors
// SPDX-License-Identifier: Apache-2.0
#include "colordesc/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <map>
#include <numeric>
#include <random>

#include "colordesc/errors.hpp"
#include "colordesc/kernel/rng.hpp"

namespace colordesc {

std::vector<std::string> tokenize(std::string_view raw) {
    std::vector<std::string> out;
    std::string current;
    for (const char ch : raw) {
        const auto uc = static_cast<unsigned char>(ch);
        if (std::isspace(uc)) {
            if (!current.empty()) {
                out.push_back(std::move(current));
                current.clear();
            }
        } else {
            current.push_back(static_cast<char>(std::tolower(uc)));
        }
    }
    if (!current.empty()) {
        out.push_back(std::move(current));
    }
    return out;
}

std::string join_tokens(std::span<const std::string> tokens) {
    std::string out;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        if (i > 0) out.push_back(' ');
        out += tokens[i];
    }
    return out;
}

Description Description::from_text(std::string_view raw) {
    return Description{std::string(raw), tokenize(raw)};
}

Vocabulary::Vocabulary()
    : id_to_token_{std::string(kStartToken), std::string(kEndToken), std::string(kUnknownToken)},
      token_to_id_{{std::string(kStartToken), kStart},
                   {std::string(kEndToken), kEnd},
                   {std::string(kUnknownToken), kUnknown}} {}

Vocabulary Vocabulary::from_tokens(std::vector<std::string> id_to_token) {
    if (id_to_token.size() < 3 || id_to_token[kStart] != kStartToken ||
        id_to_token[kEnd] != kEndToken || id_to_token[kUnknown] != kUnknownToken) {
        throw FormatError("vocabulary must begin with <s>, </s>, <unk>");
    }
    Vocabulary v;
    v.id_to_token_ = std::move(id_to_token);
    v.token_to_id_.clear();
    v.token_to_id_.reserve(v.id_to_token_.size());
    for (std::size_t i = 0; i < v.id_to_token_.size(); ++i) {
        const auto [it, inserted] = v.token_to_id_.emplace(v.id_to_token_[i], static_cast<int>(i));
        if (!inserted) {
            throw FormatError("duplicate vocabulary token '" + v.id_to_token_[i] + "'");
        }
    }
    return v;
}

Vocabulary Vocabulary::build(const Dataset& train) {
    std::map<std::string, std::size_t> counts;
    for (const auto& ex : train.items) {
        for (const auto& t : ex.description.tokens) {
            ++counts[t];
        }
    }
    std::vector<std::pair<std::string, std::size_t>> ranked(counts.begin(), counts.end());
    // std::map iteration is already lexicographic, so a stable sort on count keeps ties ordered.
    std::stable_sort(ranked.begin(), ranked.end(),
                     [](const auto& a, const auto& b) { return a.second > b.second; });
    std::vector<std::string> ids{std::string(kStartToken), std::string(kEndToken),
                                 std::string(kUnknownToken)};
    for (auto& [tok, n] : ranked) {
        if (tok == kStartToken || tok == kEndToken || tok == kUnknownToken) continue;
        ids.push_back(tok);
    }
    return from_tokens(std::move(ids));
}

std::optional<int> Vocabulary::find(std::string_view token) const {
    const auto it = token_to_id_.find(std::string(token));
    if (it == token_to_id_.end()) return std::nullopt;
    return it->second;
}

int Vocabulary::id(std::string_view token) const {
    return find(token).value_or(kUnknown);
}

const std::string& Vocabulary::token(int id) const {
    return id_to_token_.at(static_cast<std::size_t>(id));
}

std::vector<int> Vocabulary::encode(std::span<const std::string> tokens) const {
    std::vector<int> ids;
    ids.reserve(tokens.size() + 2);
    ids.push_back(kStart);
    for (const auto& t : tokens) {
        ids.push_back(id(t));
    }
    ids.push_back(kEnd);
    return ids;
}

std::vector<int> Vocabulary::encode(std::string_view raw) const {
    return encode(tokenize(raw));
}

std::vector<std::string> Vocabulary::decode(std::span<const int> ids) const {
    std::vector<std::string> out;
    for (const int id : ids) {
        if (id == kStart || id == kEnd) continue;
        out.push_back(token(id));
    }
    return out;
}

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

std::optional<double> parse_number(std::string_view s) {
    s = trim(s);
    double x = 0.0;
    const auto* end = s.data() + s.size();
    const auto [ptr, ec] = std::from_chars(s.data(), end, x);
    if (ec != std::errc{} || ptr != end) return std::nullopt;
    return x;
}

/// Splits into at most four fields; the last keeps any further delimiters.
std::vector<std::string_view> split_fields(std::string_view line, char delim) {
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (fields.size() < 3) {
        const auto pos = line.find(delim, start);
        if (pos == std::string_view::npos) break;
        fields.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
    fields.push_back(line.substr(start));
    return fields;
}

std::string lower(std::string_view s) {
    std::string out(s);
    for (auto& ch : out) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
    return out;
}

}  // namespace

LoadReport load_corpus(const std::filesystem::path& path, ColorSpace space, std::string split) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw UsageError("cannot open corpus file: " + path.string());
    }
    LoadReport report;
    report.dataset.split = std::move(split);

    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (first) {
            // strip a UTF-8 byte order mark
            if (line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
            report.delimiter = line.find('\t') != std::string::npos ? '\t' : ',';
        }
        if (trim(line).empty()) {
            first = false;
            continue;
        }
        const auto fields = split_fields(line, report.delimiter);
        if (first) {
            first = false;
            if (!parse_number(fields.front())) {
                report.had_header = true;
                if (fields.size() != 4) {
                    throw UsageError(path.string() + ": header has " + std::to_string(fields.size()) +
                                     " columns, expected 4");
                }
                const std::string third = lower(trim(fields[2]));
                const std::string expected = space == ColorSpace::hsv ? "v" : "l";
                if (lower(trim(fields[0])) != "h" || lower(trim(fields[1])) != "s" ||
                    third != expected) {
                    throw UsageError(path.string() + ": header '" + line +
                                     "' does not match declared color space (expected h,s," +
                                     expected + ",description)");
                }
                continue;
            }
        }
        if (fields.size() != 4) {
            ++report.skipped;
            continue;
        }
        const auto a = parse_number(fields[0]);
        const auto b = parse_number(fields[1]);
        const auto c = parse_number(fields[2]);
        auto desc = Description::from_text(trim(fields[3]));
        if (!a || !b || !c || desc.tokens.empty()) {
            ++report.skipped;
            continue;
        }
        try {
            ColorHSV color = space == ColorSpace::hsv
                                 ? canonicalize(ColorHSV{*a, *b, *c})
                                 : hsl_to_hsv(canonicalize(ColorHSL{*a, *b, *c}));
            report.dataset.items.push_back(Example{color, std::move(desc)});
        } catch (const UsageError&) {
            ++report.skipped;
        }
    }
    if (report.dataset.items.empty()) {
        throw UsageError(path.string() + ": no valid records (" + std::to_string(report.skipped) +
                         " skipped)");
    }
    return report;
}

SplitManifest SplitManifest::read(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw UsageError("cannot open split manifest: " + path.string());
    }
    SplitManifest m;
    const auto base = path.parent_path();
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto t = trim(line);
        if (t.empty() || t.front() == '#') continue;
        const auto eq = t.find('=');
        if (eq == std::string_view::npos) {
            throw UsageError(path.string() + ":" + std::to_string(lineno) + ": expected key=value");
        }
        const std::string key = lower(trim(t.substr(0, eq)));
        const std::string value(trim(t.substr(eq + 1)));
        auto resolve = [&](const std::string& v) {
            std::filesystem::path p(v);
            return p.is_absolute() ? p : base / p;
        };
        if (key == "train") {
            m.train = resolve(value);
        } else if (key == "dev") {
            m.dev = resolve(value);
        } else if (key == "test") {
            m.test = resolve(value);
        } else if (key == "color_space") {
            const auto v = lower(value);
            if (v == "hsv") {
                m.color_space = ColorSpace::hsv;
            } else if (v == "hsl") {
                m.color_space = ColorSpace::hsl;
            } else {
                throw UsageError(path.string() + ": color_space must be hsv or hsl");
            }
        } else {
            throw UsageError(path.string() + ":" + std::to_string(lineno) + ": unknown key '" + key + "'");
        }
    }
    if (m.train.empty() && m.dev.empty() && m.test.empty()) {
        throw UsageError(path.string() + ": names no split (train=, dev=, test=)");
    }
    return m;
}

std::filesystem::path SplitManifest::path_for(std::string_view split) const {
    const std::filesystem::path* p = nullptr;
    if (split == "train") p = &train;
    if (split == "dev") p = &dev;
    if (split == "test") p = &test;
    if (p == nullptr) {
        throw UsageError("unknown split '" + std::string(split) + "' (train|dev|test)");
    }
    if (p->empty()) {
        throw UsageError("manifest has no '" + std::string(split) + "' entry");
    }
    return *p;
}

Dataset subsample(const Dataset& data, std::size_t n, std::uint64_t seed) {
    if (n >= data.size()) return data;
    std::vector<std::size_t> order(data.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    Rng rng(seed);
    std::shuffle(order.begin(), order.end(), rng.engine());
    order.resize(n);
    std::sort(order.begin(), order.end());
    Dataset out;
    out.split = data.split;
    out.items.reserve(n);
    for (const auto i : order) out.items.push_back(data.items[i]);
    return out;
}

}  // namespace colordesc
