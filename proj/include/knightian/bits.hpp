#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace knightian {

/// A bitstring, one bit per element (0 or 1).
using Bits = std::vector<std::uint8_t>;

/// Parses an ASCII "0"/"1" string. Throws ValidationError("BadBits") on any
/// other character.
Bits parse_bits(std::string_view text);

std::string to_string(const Bits& bits);

/// Bits of `value`, most significant first, exactly `width` wide.
Bits to_bits(std::uint64_t value, unsigned width);

/// Inverse of to_bits; the string must be at most 64 bits long.
std::uint64_t to_uint(const Bits& bits);

/// All bitstrings of length n in lexicographic order.
std::vector<Bits> all_bitstrings(unsigned n);

/// Elias-gamma code of a positive integer: floor(log2 v) zeros followed by
/// the binary expansion of v.
Bits elias_gamma(std::uint64_t value);

/// Decodes an Elias-gamma value starting at `pos`. On success advances `pos`
/// past the code word and returns true; returns false if the input runs out
/// first (the caller decides what that means).
bool read_elias_gamma(const Bits& bits, std::size_t& pos, std::uint64_t& value);

}  // namespace knightian
