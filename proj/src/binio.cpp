// Copyright 2026 The lau Authors
// SPDX-License-Identifier: Apache-2.0

#include "lau/binio.hpp"

#include <istream>
#include <ostream>

#include "lau/error.hpp"

namespace lau {

namespace {

void put_le(std::ostream& os, uint64_t v, size_t nbytes) {
  char buf[8];
  for (size_t i = 0; i < nbytes; ++i) {
    buf[i] = static_cast<char>((v >> (8 * i)) & 0xFF);
  }
  os.write(buf, static_cast<std::streamsize>(nbytes));
}

uint64_t get_le(std::istream& is, size_t nbytes) {
  char buf[8];
  is.read(buf, static_cast<std::streamsize>(nbytes));
  if (!is) throw Error("unexpected end of file");
  uint64_t v = 0;
  for (size_t i = 0; i < nbytes; ++i) {
    v |= static_cast<uint64_t>(static_cast<unsigned char>(buf[i])) << (8 * i);
  }
  return v;
}

}  // namespace

void write_u32(std::ostream& os, uint32_t v) { put_le(os, v, 4); }
void write_u16(std::ostream& os, uint16_t v) { put_le(os, v, 2); }
void write_u8(std::ostream& os, uint8_t v) { put_le(os, v, 1); }

void write_f32(std::ostream& os, float v) {
  uint32_t bits;
  std::memcpy(&bits, &v, 4);
  write_u32(os, bits);
}

void write_f32_array(std::ostream& os, const float* data, size_t n) {
  for (size_t i = 0; i < n; ++i) write_f32(os, data[i]);
}

void write_bytes(std::ostream& os, const std::string& s) {
  os.write(s.data(), static_cast<std::streamsize>(s.size()));
}

uint32_t read_u32(std::istream& is) {
  return static_cast<uint32_t>(get_le(is, 4));
}
uint16_t read_u16(std::istream& is) {
  return static_cast<uint16_t>(get_le(is, 2));
}
uint8_t read_u8(std::istream& is) { return static_cast<uint8_t>(get_le(is, 1)); }

float read_f32(std::istream& is) {
  uint32_t bits = read_u32(is);
  float v;
  std::memcpy(&v, &bits, 4);
  return v;
}

void read_f32_array(std::istream& is, float* data, size_t n) {
  for (size_t i = 0; i < n; ++i) data[i] = read_f32(is);
}

std::string read_bytes(std::istream& is, size_t n) {
  std::string s(n, '\0');
  is.read(s.data(), static_cast<std::streamsize>(n));
  if (!is) throw Error("unexpected end of file");
  return s;
}

}  // namespace lau
