// Copyright 2026 The lau Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace lau {

// Base error for all lau failures. CLI maps these to exit code 1.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Exact-match lookup failed and the provider was configured with
// fallback=error. Carries the text that missed.
class CacheMiss : public Error {
 public:
  explicit CacheMiss(const std::string& text)
      : Error("embedding cache miss for text: \"" + text + "\""), text_(text) {}
  const std::string& text() const { return text_; }

 private:
  std::string text_;
};

}  // namespace lau
