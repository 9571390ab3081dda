#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>

#include "qmc/errors.hpp"

// Little-endian scalar helpers shared by the QMAT and QMSK codecs.
namespace qmc::detail {

inline void put_u32(std::ostream& out, std::uint32_t v) {
  const char bytes[4] = {static_cast<char>(v & 0xff), static_cast<char>((v >> 8) & 0xff),
                         static_cast<char>((v >> 16) & 0xff),
                         static_cast<char>((v >> 24) & 0xff)};
  out.write(bytes, 4);
}

inline void put_f64(std::ostream& out, double v) {
  auto bits = std::bit_cast<std::uint64_t>(v);
  char bytes[8];
  for (int b = 0; b < 8; ++b) bytes[b] = static_cast<char>((bits >> (8 * b)) & 0xff);
  out.write(bytes, 8);
}

inline void read_exact(std::istream& in, char* dst, std::size_t n, const char* what) {
  in.read(dst, static_cast<std::streamsize>(n));
  if (static_cast<std::size_t>(in.gcount()) != n) {
    throw FormatError(std::string(what) + ": unexpected end of data");
  }
}

inline std::uint32_t get_u32(std::istream& in, const char* what) {
  unsigned char bytes[4];
  read_exact(in, reinterpret_cast<char*>(bytes), 4, what);
  return static_cast<std::uint32_t>(bytes[0]) | (static_cast<std::uint32_t>(bytes[1]) << 8) |
         (static_cast<std::uint32_t>(bytes[2]) << 16) |
         (static_cast<std::uint32_t>(bytes[3]) << 24);
}

inline double get_f64(std::istream& in, const char* what) {
  unsigned char bytes[8];
  read_exact(in, reinterpret_cast<char*>(bytes), 8, what);
  std::uint64_t bits = 0;
  for (int b = 0; b < 8; ++b) bits |= static_cast<std::uint64_t>(bytes[b]) << (8 * b);
  return std::bit_cast<double>(bits);
}

/// Reads the 4-byte magic and the version byte, throwing FormatError on mismatch.
inline void expect_header(std::istream& in, const char (&magic)[5], std::uint8_t version,
                          const char* what) {
  char got[4];
  read_exact(in, got, 4, what);
  if (std::memcmp(got, magic, 4) != 0) {
    throw FormatError(std::string(what) + ": bad magic");
  }
  char v = 0;
  read_exact(in, &v, 1, what);
  if (static_cast<std::uint8_t>(v) != version) {
    throw FormatError(std::string(what) + ": unsupported version " +
                      std::to_string(static_cast<unsigned>(static_cast<std::uint8_t>(v))));
  }
}

}  // namespace qmc::detail
