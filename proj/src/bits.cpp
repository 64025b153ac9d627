#include "knightian/bits.hpp"

#include <bit>

#include "knightian/error.hpp"

namespace knightian {

Bits parse_bits(std::string_view text) {
  Bits out;
  out.reserve(text.size());
  for (char c : text) {
    if (c != '0' && c != '1') {
      throw ValidationError("BadBits", "expected only '0'/'1', saw '" + std::string(1, c) + "'");
    }
    out.push_back(static_cast<std::uint8_t>(c - '0'));
  }
  return out;
}

std::string to_string(const Bits& bits) {
  std::string s;
  s.reserve(bits.size());
  for (auto b : bits) s.push_back(b ? '1' : '0');
  return s;
}

Bits to_bits(std::uint64_t value, unsigned width) {
  Bits out(width);
  for (unsigned i = 0; i < width; ++i) out[width - 1 - i] = (value >> i) & 1u;
  return out;
}

std::uint64_t to_uint(const Bits& bits) {
  if (bits.size() > 64) throw ValidationError("BadBits", "more than 64 bits");
  std::uint64_t v = 0;
  for (auto b : bits) v = (v << 1) | b;
  return v;
}

std::vector<Bits> all_bitstrings(unsigned n) {
  std::vector<Bits> out;
  out.reserve(std::size_t{1} << n);
  for (std::uint64_t v = 0; v < (std::uint64_t{1} << n); ++v) out.push_back(to_bits(v, n));
  return out;
}

Bits elias_gamma(std::uint64_t value) {
  if (value == 0) throw ValidationError("BadValue", "Elias gamma needs a positive integer");
  const unsigned width = static_cast<unsigned>(std::bit_width(value));
  Bits out(width - 1, 0);
  auto tail = to_bits(value, width);
  out.insert(out.end(), tail.begin(), tail.end());
  return out;
}

bool read_elias_gamma(const Bits& bits, std::size_t& pos, std::uint64_t& value) {
  std::size_t p = pos;
  unsigned zeros = 0;
  while (p < bits.size() && bits[p] == 0) {
    ++zeros;
    ++p;
  }
  if (p >= bits.size() || zeros > 62) return false;
  if (p + zeros + 1 > bits.size()) return false;
  std::uint64_t v = 0;
  for (unsigned i = 0; i <= zeros; ++i) v = (v << 1) | bits[p + i];
  pos = p + zeros + 1;
  value = v;
  return true;
}

}  // namespace knightian
