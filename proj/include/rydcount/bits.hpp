#pragma once

#include <cstdint>
#include <string>

#include "rydcount/errors.hpp"

namespace rydcount {

// Bitstring convention: bit i of the mask is the value of vertex index i.
// The serialized string lists bits from highest index to lowest (leftmost
// character = vertex n-1), so the string read as a binary numeral equals the
// mask value.

inline std::string to_bitstring(std::uint64_t mask, int n) {
  std::string s(static_cast<std::size_t>(n), '0');
  for (int i = 0; i < n; ++i) {
    if ((mask >> i) & 1ull) s[static_cast<std::size_t>(n - 1 - i)] = '1';
  }
  return s;
}

inline std::uint64_t from_bitstring(const std::string& s) {
  if (s.empty() || s.size() > 63)
    throw InvalidArgument("bitstring length must be in [1, 63]");
  std::uint64_t mask = 0;
  const int n = static_cast<int>(s.size());
  for (int pos = 0; pos < n; ++pos) {
    const char c = s[static_cast<std::size_t>(pos)];
    if (c == '1') {
      mask |= 1ull << (n - 1 - pos);
    } else if (c != '0') {
      throw InvalidArgument("bitstring may contain only '0'/'1'");
    }
  }
  return mask;
}

}  // namespace rydcount
