// Copyright 2026 The natlm Authors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace natlm {

inline constexpr const char* kToolVersion = "0.1.0";

/// Base class for all errors raised by the natlm library.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

class ParseError : public Error {
public:
    explicit ParseError(const std::string& what) : Error(what) {}
};

class IoError : public Error {
public:
    explicit IoError(const std::string& what) : Error(what) {}
};

using Bytes = std::vector<uint8_t>;

/// Decode a hex string into bytes. Accepts an optional 0x prefix and
/// ignores ASCII whitespace anywhere in the input.
Bytes parse_hex(std::string_view text);

std::string to_hex(const Bytes& bytes);

/// FNV-1a 64-bit. Used wherever a platform-stable hash is required
/// (std::hash is implementation-defined).
constexpr uint64_t fnv1a(std::string_view s, uint64_t seed = 0xcbf29ce484222325ull) {
    uint64_t h = seed;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

// Little-endian scalar encode/decode for the store file format.
void put_u32(Bytes& out, uint32_t v);
void put_u64(Bytes& out, uint64_t v);
void put_f64(Bytes& out, double v);
uint32_t get_u32(const Bytes& in, size_t& pos);
uint64_t get_u64(const Bytes& in, size_t& pos);
double get_f64(const Bytes& in, size_t& pos);

std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view content);
void write_file(const std::string& path, const Bytes& content);

std::string base64_encode(const Bytes& data);
Bytes base64_decode(std::string_view text);

std::string to_lower(std::string_view s);
bool contains_ci(std::string_view haystack, std::string_view needle);

}  // namespace natlm
