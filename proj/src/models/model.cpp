// Copyright (c) 2026, The colordesc Authors
// SPDX-License-Identifier: Apache-2.0
#include "colordesc/models/model.hpp"

#include "colordesc/errors.hpp"

namespace colordesc {

std::string to_string(ModelFamily family) {
    switch (family) {
        case ModelFamily::rnn:
            return "rnn";
        case ModelFamily::atomic:
            return "atomic";
        case ModelFamily::histogram:
            return "hm";
    }
    return "?";
}

ModelFamily parse_model_family(std::string_view name) {
    if (name == "rnn") return ModelFamily::rnn;
    if (name == "atomic") return ModelFamily::atomic;
    if (name == "hm" || name == "histogram") return ModelFamily::histogram;
    throw UsageError("unknown model family '" + std::string(name) + "' (rnn|atomic|hm)");
}

}  // namespace colordesc
