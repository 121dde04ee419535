// Copyright (c) 2026, The colordesc Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace colordesc {

/// Bad input supplied by the caller: malformed files, unknown enum names,
/// missing paths, unencodable descriptions. The CLI maps this to exit code 2.
class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed or truncated binary/text artifacts (checkpoints, reports).
class FormatError : public UsageError {
public:
    using UsageError::UsageError;
};

/// Non-finite values during training or scoring. The CLI maps this to exit code 3.
class NumericError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace colordesc
