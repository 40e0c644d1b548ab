// Copyright 2026 The lau Authors
// SPDX-License-Identifier: Apache-2.0

#include "lau/utf8.hpp"

#include <array>

#include "lau/error.hpp"

namespace lau {

std::vector<uint32_t> utf8_decode(const std::string& s) {
  std::vector<uint32_t> out;
  out.reserve(s.size());
  size_t i = 0;
  while (i < s.size()) {
    unsigned char c = static_cast<unsigned char>(s[i]);
    uint32_t cp = 0;
    size_t len = 0;
    if (c < 0x80) {
      cp = c;
      len = 1;
    } else if ((c & 0xE0) == 0xC0) {
      cp = c & 0x1F;
      len = 2;
    } else if ((c & 0xF0) == 0xE0) {
      cp = c & 0x0F;
      len = 3;
    } else if ((c & 0xF8) == 0xF0) {
      cp = c & 0x07;
      len = 4;
    } else {
      throw Error("invalid UTF-8 lead byte at offset " + std::to_string(i));
    }
    if (i + len > s.size()) {
      throw Error("truncated UTF-8 sequence at offset " + std::to_string(i));
    }
    for (size_t k = 1; k < len; ++k) {
      unsigned char cc = static_cast<unsigned char>(s[i + k]);
      if ((cc & 0xC0) != 0x80) {
        throw Error("invalid UTF-8 continuation at offset " +
                    std::to_string(i + k));
      }
      cp = (cp << 6) | (cc & 0x3F);
    }
    static const uint32_t kMinByLen[5] = {0, 0, 0x80, 0x800, 0x10000};
    if (len > 1 && cp < kMinByLen[len]) {
      throw Error("overlong UTF-8 sequence at offset " + std::to_string(i));
    }
    if (cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) {
      throw Error("invalid code point at offset " + std::to_string(i));
    }
    out.push_back(cp);
    i += len;
  }
  return out;
}

std::string utf8_encode_one(uint32_t cp) {
  std::string out;
  if (cp < 0x80) {
    out += static_cast<char>(cp);
  } else if (cp < 0x800) {
    out += static_cast<char>(0xC0 | (cp >> 6));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else if (cp < 0x10000) {
    out += static_cast<char>(0xE0 | (cp >> 12));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else {
    out += static_cast<char>(0xF0 | (cp >> 18));
    out += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  }
  return out;
}

std::string utf8_encode(const std::vector<uint32_t>& cps) {
  std::string out;
  out.reserve(cps.size());
  for (uint32_t cp : cps) out += utf8_encode_one(cp);
  return out;
}

namespace {

// (base, combining mark) -> precomposed Latin-1 / Latin Extended-A point.
struct Composition {
  uint32_t base;
  uint32_t mark;
  uint32_t composed;
};

constexpr std::array<Composition, 58> kCompositions = {{
    // U+0300 combining grave
    {'A', 0x300, 0xC0}, {'E', 0x300, 0xC8}, {'I', 0x300, 0xCC},
    {'O', 0x300, 0xD2}, {'U', 0x300, 0xD9}, {'a', 0x300, 0xE0},
    {'e', 0x300, 0xE8}, {'i', 0x300, 0xEC}, {'o', 0x300, 0xF2},
    {'u', 0x300, 0xF9},
    // U+0301 combining acute
    {'A', 0x301, 0xC1}, {'E', 0x301, 0xC9}, {'I', 0x301, 0xCD},
    {'O', 0x301, 0xD3}, {'U', 0x301, 0xDA}, {'Y', 0x301, 0xDD},
    {'a', 0x301, 0xE1}, {'e', 0x301, 0xE9}, {'i', 0x301, 0xED},
    {'o', 0x301, 0xF3}, {'u', 0x301, 0xFA}, {'y', 0x301, 0xFD},
    {'C', 0x301, 0x106}, {'c', 0x301, 0x107}, {'N', 0x301, 0x143},
    {'n', 0x301, 0x144},
    // U+0302 combining circumflex
    {'A', 0x302, 0xC2}, {'E', 0x302, 0xCA}, {'I', 0x302, 0xCE},
    {'O', 0x302, 0xD4}, {'U', 0x302, 0xDB}, {'a', 0x302, 0xE2},
    {'e', 0x302, 0xEA}, {'i', 0x302, 0xEE}, {'o', 0x302, 0xF4},
    {'u', 0x302, 0xFB},
    // U+0303 combining tilde
    {'A', 0x303, 0xC3}, {'N', 0x303, 0xD1}, {'O', 0x303, 0xD5},
    {'a', 0x303, 0xE3}, {'n', 0x303, 0xF1}, {'o', 0x303, 0xF5},
    // U+0308 combining diaeresis
    {'A', 0x308, 0xC4}, {'E', 0x308, 0xCB}, {'I', 0x308, 0xCF},
    {'O', 0x308, 0xD6}, {'U', 0x308, 0xDC}, {'a', 0x308, 0xE4},
    {'e', 0x308, 0xEB}, {'i', 0x308, 0xEF}, {'o', 0x308, 0xF6},
    {'u', 0x308, 0xFC}, {'y', 0x308, 0xFF},
    // U+030A combining ring above
    {'A', 0x30A, 0xC5}, {'a', 0x30A, 0xE5},
    // U+0327 combining cedilla
    {'C', 0x327, 0xC7}, {'c', 0x327, 0xE7},
    // U+030C combining caron (soloni-style orthographies)
    {'Z', 0x30C, 0x17D},
}};

uint32_t compose_pair(uint32_t base, uint32_t mark) {
  for (const auto& c : kCompositions) {
    if (c.base == base && c.mark == mark) return c.composed;
  }
  return 0;
}

}  // namespace

std::string nfc_latin(const std::string& s) {
  std::vector<uint32_t> cps = utf8_decode(s);
  std::vector<uint32_t> out;
  out.reserve(cps.size());
  for (uint32_t cp : cps) {
    if (!out.empty()) {
      uint32_t composed = compose_pair(out.back(), cp);
      if (composed != 0) {
        out.back() = composed;
        continue;
      }
    }
    out.push_back(cp);
  }
  return utf8_encode(out);
}

}  // namespace lau
