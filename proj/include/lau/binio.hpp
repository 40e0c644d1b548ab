// Copyright 2026 The lau Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <cstring>
#include <iosfwd>
#include <string>
#include <vector>

namespace lau {

// Little-endian primitives for the feature and checkpoint file formats.
// The host is assumed little-endian; reads and writes go through byte
// buffers so alignment never matters.

void write_u32(std::ostream& os, uint32_t v);
void write_u16(std::ostream& os, uint16_t v);
void write_u8(std::ostream& os, uint8_t v);
void write_f32(std::ostream& os, float v);
void write_f32_array(std::ostream& os, const float* data, size_t n);
void write_bytes(std::ostream& os, const std::string& s);

uint32_t read_u32(std::istream& is);
uint16_t read_u16(std::istream& is);
uint8_t read_u8(std::istream& is);
float read_f32(std::istream& is);
void read_f32_array(std::istream& is, float* data, size_t n);
std::string read_bytes(std::istream& is, size_t n);

}  // namespace lau
