// Copyright (c) 2026, The colordesc Authors
// SPDX-License-Identifier: Apache-2.0
//
// Versioned binary checkpoints for all three model families. The byte layout
// is documented in docs/checkpoint-format.md.
#pragma once

#include <filesystem>
#include <memory>
#include <string>
#include <string_view>

#include "json.hpp"

#include "colordesc/models/atomic.hpp"
#include "colordesc/models/histogram.hpp"
#include "colordesc/models/model.hpp"
#include "colordesc/models/sequence_decoder.hpp"

namespace colordesc {

inline constexpr std::string_view kCheckpointMagic = "CDESCKPT";
inline constexpr std::uint32_t kCheckpointVersion = 1;

struct LoadedCheckpoint {
    std::unique_ptr<ConditionalModel> model;
    /// The full metadata block: hyperparameters, featurizer, vocabulary or inventory, run info.
    nlohmann::json metadata;
};

/// `run` is stored verbatim under metadata["run"] (seed, PRNG id, epochs trained, ...).
std::string serialize_checkpoint(const ConditionalModel& model, const nlohmann::json& run = {});
LoadedCheckpoint deserialize_checkpoint(std::string_view bytes);

void save_checkpoint(const ConditionalModel& model, const std::filesystem::path& path,
                     const nlohmann::json& run = {});
LoadedCheckpoint load_checkpoint(const std::filesystem::path& path);

/// Family-checked loaders; a checkpoint of another family is rejected with FormatError.
SequenceDecoder<float> load_sequence_checkpoint(const std::filesystem::path& path);
AtomicModel<float> load_atomic_checkpoint(const std::filesystem::path& path);
HistogramModel load_histogram_checkpoint(const std::filesystem::path& path);

}  // namespace colordesc
