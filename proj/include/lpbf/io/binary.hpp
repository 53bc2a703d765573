#pragma once

#include <array>
#include <bit>
#include <cstdint>
#include <istream>
#include <ostream>
#include <string>
#include <string_view>
#include <type_traits>

#include "lpbf/common.hpp"

namespace lpbf::io {

/// Little-endian scalar writes/reads independent of host byte order.
template <typename T>
void write_le(std::ostream& out, T value) {
  using U = std::conditional_t<sizeof(T) == 8, std::uint64_t, std::uint32_t>;
  static_assert(sizeof(T) == sizeof(U));
  U bits = std::bit_cast<U>(value);
  std::array<char, sizeof(U)> buf{};
  for (std::size_t i = 0; i < sizeof(U); ++i) buf[i] = static_cast<char>((bits >> (8 * i)) & 0xFFu);
  out.write(buf.data(), buf.size());
}

template <typename T>
T read_le(std::istream& in) {
  using U = std::conditional_t<sizeof(T) == 8, std::uint64_t, std::uint32_t>;
  std::array<unsigned char, sizeof(U)> buf{};
  in.read(reinterpret_cast<char*>(buf.data()), buf.size());
  if (!in) throw Error("unexpected end of binary stream");
  U bits = 0;
  for (std::size_t i = 0; i < sizeof(U); ++i) bits |= static_cast<U>(buf[i]) << (8 * i);
  return std::bit_cast<T>(bits);
}

inline void expect_magic(std::istream& in, const char (&magic)[5]) {
  char got[4]{};
  in.read(got, 4);
  if (!in || std::string_view(got, 4) != std::string_view(magic, 4))
    throw Error(std::string("bad magic, expected ") + magic);
}

}  // namespace lpbf::io
