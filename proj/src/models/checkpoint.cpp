// Copyright (c) 2026, The colordesc Authors
// SPDX-License-Identifier: Apache-2.0
#include "colordesc/models/checkpoint.hpp"

#include <zlib.h>

#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <map>
#include <sstream>

#include "colordesc/errors.hpp"
#include "colordesc/kernel/rng.hpp"

namespace colordesc {

namespace {

enum class DType : std::uint32_t { f32 = 0, u32 = 1 };

std::uint32_t family_code(ModelFamily f) {
    switch (f) {
        case ModelFamily::rnn:
            return 0;
        case ModelFamily::atomic:
            return 1;
        case ModelFamily::histogram:
            return 2;
    }
    return 0xFFFFFFFFu;
}

ModelFamily family_from_code(std::uint32_t code, std::size_t offset) {
    switch (code) {
        case 0:
            return ModelFamily::rnn;
        case 1:
            return ModelFamily::atomic;
        case 2:
            return ModelFamily::histogram;
        default:
            throw FormatError("unknown model family code " + std::to_string(code) + " at offset " +
                              std::to_string(offset));
    }
}

class ByteWriter {
public:
    void u32(std::uint32_t v) {
        for (int i = 0; i < 4; ++i) buf_.push_back(static_cast<char>((v >> (8 * i)) & 0xFFu));
    }
    void f32(float v) { u32(std::bit_cast<std::uint32_t>(v)); }
    void bytes(std::string_view s) { buf_.append(s); }
    void str(std::string_view s) {
        u32(static_cast<std::uint32_t>(s.size()));
        bytes(s);
    }
    [[nodiscard]] const std::string& buffer() const { return buf_; }
    std::string take() { return std::move(buf_); }

private:
    std::string buf_;
};

class ByteReader {
public:
    explicit ByteReader(std::string_view data) : data_(data) {}

    [[nodiscard]] std::size_t offset() const { return pos_; }

    void need(std::size_t n, const char* what) const {
        if (data_.size() - pos_ < n) {
            throw FormatError("checkpoint truncated at offset " + std::to_string(pos_) + ": need " +
                              std::to_string(n) + " bytes for " + what + ", have " +
                              std::to_string(data_.size() - pos_));
        }
    }
    std::uint32_t u32(const char* what) {
        need(4, what);
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i) {
            v |= static_cast<std::uint32_t>(static_cast<unsigned char>(data_[pos_ + i])) << (8 * i);
        }
        pos_ += 4;
        return v;
    }
    float f32(const char* what) { return std::bit_cast<float>(u32(what)); }
    std::string_view bytes(std::size_t n, const char* what) {
        need(n, what);
        auto s = data_.substr(pos_, n);
        pos_ += n;
        return s;
    }
    std::string str(const char* what) {
        const auto n = u32(what);
        return std::string(bytes(n, what));
    }

private:
    std::string_view data_;
    std::size_t pos_{0};
};

std::uint32_t crc32_of(std::string_view bytes) {
    uLong crc = crc32(0L, Z_NULL, 0);
    crc = crc32(crc, reinterpret_cast<const Bytef*>(bytes.data()), static_cast<uInt>(bytes.size()));
    return static_cast<std::uint32_t>(crc);
}

struct RawTensor {
    DType dtype;
    std::vector<std::size_t> shape;
    std::vector<std::uint32_t> words;  // little-endian decoded 32-bit payload
};

void write_tensor(ByteWriter& w, std::string_view name, const Tensor<float>& t) {
    w.str(name);
    w.u32(static_cast<std::uint32_t>(DType::f32));
    w.u32(static_cast<std::uint32_t>(t.rank()));
    for (auto d : t.shape()) w.u32(static_cast<std::uint32_t>(d));
    for (const float v : t.values()) w.f32(v);
}

void write_u32_tensor(ByteWriter& w, std::string_view name, std::size_t rows, std::size_t cols,
                      const std::vector<std::uint32_t>& values) {
    w.str(name);
    w.u32(static_cast<std::uint32_t>(DType::u32));
    w.u32(2);
    w.u32(static_cast<std::uint32_t>(rows));
    w.u32(static_cast<std::uint32_t>(cols));
    for (const auto v : values) w.u32(v);
}

nlohmann::json featurizer_meta(FeatureScheme scheme) {
    nlohmann::json j{{"scheme", to_string(scheme)}};
    switch (scheme) {
        case FeatureScheme::raw:
            j["scale"] = {360.0, 100.0, 100.0};
            break;
        case FeatureScheme::fourier:
            j["phase_divisors"] = {360.0, 200.0, 200.0};
            j["frequencies"] = {0, 1, 2};
            j["layout"] = "real[27] then imag[27], (j,k,l) row-major, l fastest";
            break;
        case FeatureScheme::buckets:
            j["grids"] = {{90, 10, 10}, {45, 5, 5}, {1, 1, 1}};
            j["upper_edge"] = "closed (s=100, v=100 in last cell)";
            break;
    }
    return j;
}

template <typename Named>
void write_named(ByteWriter& w, const Named& named) {
    w.u32(static_cast<std::uint32_t>(named.size()));
    for (const auto& nt : named) write_tensor(w, nt.name, *nt.tensor);
}

std::string finish(ByteWriter& w) {
    const std::uint32_t crc = crc32_of(w.buffer());
    w.u32(crc);
    return w.take();
}

void write_header(ByteWriter& w, ModelFamily family, const nlohmann::json& meta) {
    w.bytes(kCheckpointMagic);
    w.u32(kCheckpointVersion);
    w.u32(family_code(family));
    w.str(meta.dump());
}

std::map<std::string, RawTensor> read_tensors(ByteReader& r) {
    std::map<std::string, RawTensor> out;
    const auto count = r.u32("tensor count");
    for (std::uint32_t i = 0; i < count; ++i) {
        const auto name = r.str("tensor name");
        RawTensor t;
        const auto dtype_offset = r.offset();
        const auto dtype = r.u32("tensor dtype");
        if (dtype > 1) {
            throw FormatError("tensor '" + name + "': unknown dtype " + std::to_string(dtype) +
                              " at offset " + std::to_string(dtype_offset));
        }
        t.dtype = static_cast<DType>(dtype);
        const auto rank = r.u32("tensor rank");
        if (rank > 8) {
            throw FormatError("tensor '" + name + "': implausible rank " + std::to_string(rank));
        }
        std::size_t n = 1;
        for (std::uint32_t d = 0; d < rank; ++d) {
            t.shape.push_back(r.u32("tensor dim"));
            n *= t.shape.back();
        }
        r.need(n * 4, "tensor payload");
        t.words.resize(n);
        for (std::size_t k = 0; k < n; ++k) t.words[k] = r.u32("tensor payload");
        if (!out.emplace(name, std::move(t)).second) {
            throw FormatError("duplicate tensor '" + name + "'");
        }
    }
    return out;
}

template <typename Named>
void assign_tensors(Named named, std::map<std::string, RawTensor>& raw) {
    for (auto& nt : named) {
        const auto it = raw.find(nt.name);
        if (it == raw.end()) throw FormatError("checkpoint is missing tensor '" + nt.name + "'");
        const auto& t = it->second;
        if (t.dtype != DType::f32) throw FormatError("tensor '" + nt.name + "' must be f32");
        if (t.shape != nt.tensor->shape()) {
            throw FormatError("tensor '" + nt.name + "' shape " + shape_string(t.shape) +
                              " does not match model shape " + shape_string(nt.tensor->shape()));
        }
        for (std::size_t k = 0; k < t.words.size(); ++k) {
            (*nt.tensor)[k] = std::bit_cast<float>(t.words[k]);
        }
        raw.erase(it);
    }
    if (!raw.empty()) {
        throw FormatError("checkpoint has unexpected tensor '" + raw.begin()->first + "'");
    }
}

template <typename J, typename T>
T meta_get(const J& j, const char* key) {
    if (!j.contains(key)) throw FormatError(std::string("checkpoint metadata missing '") + key + "'");
    try {
        return j.at(key).template get<T>();
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(std::string("checkpoint metadata '") + key + "': " + e.what());
    }
}

std::string serialize_sequence(const SequenceDecoder<float>& m, const nlohmann::json& run) {
    const auto& cfg = m.config();
    nlohmann::json meta{
        {"family", to_string(ModelFamily::rnn)},
        {"hyperparameters",
         {{"conditioning", to_string(cfg.conditioning)},
          {"hidden", cfg.hidden},
          {"embedding_dim", cfg.embedding_dim},
          {"bucket_embedding_dim", cfg.bucket_embedding_dim}}},
        {"featurizer", featurizer_meta(cfg.features)},
        {"vocabulary", m.vocab().tokens()},
        {"run", run},
    };
    ByteWriter w;
    write_header(w, ModelFamily::rnn, meta);
    write_named(w, m.params().named());
    return finish(w);
}

std::string serialize_atomic(const AtomicModel<float>& m, const nlohmann::json& run) {
    const auto& cfg = m.config();
    nlohmann::json meta{
        {"family", to_string(ModelFamily::atomic)},
        {"hyperparameters",
         {{"hidden1", cfg.hidden1},
          {"hidden2", cfg.hidden2},
          {"bucket_embedding_dim", cfg.bucket_embedding_dim}}},
        {"featurizer", featurizer_meta(cfg.features)},
        {"inventory", m.inventory().items()},
        {"run", run},
    };
    ByteWriter w;
    write_header(w, ModelFamily::atomic, meta);
    write_named(w, m.params().named());
    return finish(w);
}

std::string serialize_histogram(const HistogramModel& m, const nlohmann::json& run) {
    nlohmann::json meta{
        {"family", to_string(ModelFamily::histogram)},
        {"hyperparameters", {{"smoothing", m.smoothing()}, {"backoff", "finest-nonempty"}}},
        {"featurizer", featurizer_meta(FeatureScheme::buckets)},
        {"inventory", m.inventory().items()},
        {"run", run},
    };
    ByteWriter w;
    write_header(w, ModelFamily::histogram, meta);
    static constexpr std::array<const char*, 3> names{"hm.coarse", "hm.mid", "hm.global"};
    w.u32(3);
    for (int r = 0; r < 3; ++r) {
        std::vector<std::uint32_t> rows;
        for (const auto& [cell, bucket] : m.table(static_cast<HistogramModel::Resolution>(r))) {
            for (const auto& [idx, n] : bucket.counts) {
                rows.insert(rows.end(), {static_cast<std::uint32_t>(cell),
                                         static_cast<std::uint32_t>(idx), n});
            }
        }
        write_u32_tensor(w, names[static_cast<std::size_t>(r)], rows.size() / 3, 3, rows);
    }
    return finish(w);
}

}  // namespace

std::string serialize_checkpoint(const ConditionalModel& model, const nlohmann::json& run) {
    if (const auto* s = dynamic_cast<const SequenceDecoder<float>*>(&model)) {
        return serialize_sequence(*s, run);
    }
    if (const auto* a = dynamic_cast<const AtomicModel<float>*>(&model)) {
        return serialize_atomic(*a, run);
    }
    if (const auto* h = dynamic_cast<const HistogramModel*>(&model)) {
        return serialize_histogram(*h, run);
    }
    throw UsageError("serialize_checkpoint: only 32-bit models can be saved");
}

LoadedCheckpoint deserialize_checkpoint(std::string_view bytes) {
    ByteReader r(bytes);
    const auto magic = r.bytes(kCheckpointMagic.size(), "magic");
    if (magic != kCheckpointMagic) {
        throw FormatError("not a colordesc checkpoint (bad magic at offset 0)");
    }
    const auto version = r.u32("format version");
    if (version != kCheckpointVersion) {
        throw FormatError("unsupported checkpoint format version " + std::to_string(version) +
                          " (this build reads version " + std::to_string(kCheckpointVersion) + ")");
    }
    const auto family_offset = r.offset();
    const ModelFamily family = family_from_code(r.u32("family tag"), family_offset);
    const auto meta_text = r.str("metadata");
    nlohmann::json meta;
    try {
        meta = nlohmann::json::parse(meta_text);
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(std::string("checkpoint metadata is not valid JSON: ") + e.what());
    }
    if (meta_get<nlohmann::json, std::string>(meta, "family") != to_string(family)) {
        throw FormatError("checkpoint family tag and metadata disagree");
    }
    auto raw = read_tensors(r);
    const auto payload_end = r.offset();
    const auto stored_crc = r.u32("crc32 trailer");
    if (r.offset() != bytes.size()) {
        throw FormatError("trailing bytes after crc32 at offset " + std::to_string(r.offset()));
    }
    if (stored_crc != crc32_of(bytes.substr(0, payload_end))) {
        throw FormatError("checkpoint crc32 mismatch");
    }

    const auto& hp = meta.at("hyperparameters");
    const auto scheme = parse_feature_scheme(
        meta_get<nlohmann::json, std::string>(meta.at("featurizer"), "scheme"));
    LoadedCheckpoint out;
    out.metadata = meta;
    switch (family) {
        case ModelFamily::rnn: {
            SequenceConfig cfg;
            cfg.features = scheme;
            cfg.conditioning =
                parse_conditioning(meta_get<nlohmann::json, std::string>(hp, "conditioning"));
            cfg.hidden = meta_get<nlohmann::json, int>(hp, "hidden");
            cfg.embedding_dim = meta_get<nlohmann::json, int>(hp, "embedding_dim");
            cfg.bucket_embedding_dim = meta_get<nlohmann::json, int>(hp, "bucket_embedding_dim");
            auto vocab = Vocabulary::from_tokens(
                meta_get<nlohmann::json, std::vector<std::string>>(meta, "vocabulary"));
            auto m = std::make_unique<SequenceDecoder<float>>(cfg, std::move(vocab));
            assign_tensors(m->params().named(), raw);
            out.model = std::move(m);
            break;
        }
        case ModelFamily::atomic: {
            AtomicConfig cfg;
            cfg.features = scheme;
            cfg.hidden1 = meta_get<nlohmann::json, int>(hp, "hidden1");
            cfg.hidden2 = meta_get<nlohmann::json, int>(hp, "hidden2");
            cfg.bucket_embedding_dim = meta_get<nlohmann::json, int>(hp, "bucket_embedding_dim");
            auto inv = DescriptionInventory::from_list(
                meta_get<nlohmann::json, std::vector<std::string>>(meta, "inventory"));
            auto m = std::make_unique<AtomicModel<float>>(cfg, std::move(inv));
            assign_tensors(m->params().named(), raw);
            out.model = std::move(m);
            break;
        }
        case ModelFamily::histogram: {
            auto inv = DescriptionInventory::from_list(
                meta_get<nlohmann::json, std::vector<std::string>>(meta, "inventory"));
            auto m = std::make_unique<HistogramModel>(std::move(inv),
                                                      meta_get<nlohmann::json, double>(hp, "smoothing"));
            static constexpr std::array<const char*, 3> names{"hm.coarse", "hm.mid", "hm.global"};
            for (std::size_t res = 0; res < 3; ++res) {
                const auto it = raw.find(names[res]);
                if (it == raw.end()) throw FormatError(std::string("missing tensor '") + names[res] + "'");
                const auto& t = it->second;
                if (t.dtype != DType::u32 || t.shape.size() != 2 || t.shape[1] != 3) {
                    throw FormatError(std::string("tensor '") + names[res] + "' must be u32 [n x 3]");
                }
                for (std::size_t row = 0; row < t.shape[0]; ++row) {
                    m->add_to_cell(static_cast<HistogramModel::Resolution>(res),
                                   static_cast<int>(t.words[row * 3]),
                                   static_cast<int>(t.words[row * 3 + 1]), t.words[row * 3 + 2]);
                }
                raw.erase(it);
            }
            if (!raw.empty()) {
                throw FormatError("checkpoint has unexpected tensor '" + raw.begin()->first + "'");
            }
            out.model = std::move(m);
            break;
        }
    }
    return out;
}

void save_checkpoint(const ConditionalModel& model, const std::filesystem::path& path,
                     const nlohmann::json& run) {
    const auto bytes = serialize_checkpoint(model, run);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw UsageError("cannot write checkpoint: " + path.string());
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw UsageError("failed writing checkpoint: " + path.string());
}

LoadedCheckpoint load_checkpoint(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw UsageError("cannot open checkpoint: " + path.string());
    const std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return deserialize_checkpoint(bytes);
}

namespace {

template <typename M>
M take_family(LoadedCheckpoint&& ck, ModelFamily expected) {
    if (ck.model->family() != expected) {
        throw FormatError("checkpoint holds a '" + to_string(ck.model->family()) +
                          "' model, expected '" + to_string(expected) + "'");
    }
    return std::move(*static_cast<M*>(ck.model.get()));
}

}  // namespace

SequenceDecoder<float> load_sequence_checkpoint(const std::filesystem::path& path) {
    return take_family<SequenceDecoder<float>>(load_checkpoint(path), ModelFamily::rnn);
}

AtomicModel<float> load_atomic_checkpoint(const std::filesystem::path& path) {
    return take_family<AtomicModel<float>>(load_checkpoint(path), ModelFamily::atomic);
}

HistogramModel load_histogram_checkpoint(const std::filesystem::path& path) {
    return take_family<HistogramModel>(load_checkpoint(path), ModelFamily::histogram);
}

}  // namespace colordesc
