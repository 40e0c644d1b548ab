// Copyright 2026 The lau Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace lau {

// Decodes UTF-8 into code points. Throws lau::Error on malformed input.
std::vector<uint32_t> utf8_decode(const std::string& s);

// Encodes code points back to UTF-8. Values must be valid scalar values.
std::string utf8_encode(const std::vector<uint32_t>& cps);

// Single code point to UTF-8.
std::string utf8_encode_one(uint32_t cp);

// Canonical composition for the Latin-1 precomposed range: sequences of an
// ASCII base letter followed by a common combining mark (grave, acute,
// circumflex, tilde, diaeresis, ring, cedilla) are replaced by their
// precomposed code point. Text that is already composed passes through
// unchanged. This covers the French/Latin orthographies the embedding cache
// is used with; it is not a full Unicode NFC implementation.
std::string nfc_latin(const std::string& s);

}  // namespace lau
