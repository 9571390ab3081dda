#pragma once

#include <filesystem>
#include <iosfwd>

#include "qmc/quaternion_matrix.hpp"

namespace qmc {

// QMAT layout: "QMAT", u8 version (1), u32 LE rows, u32 LE cols, then
// rows*cols*4 little-endian f64 in row-major (w, x, y, z) order.
inline constexpr std::uint8_t kQmatVersion = 1;

void write_qmat(std::ostream& out, const QuaternionMatrix& q);
void write_qmat(const std::filesystem::path& path, const QuaternionMatrix& q);

/// Throws FormatError on a wrong magic, version, or truncated payload.
QuaternionMatrix read_qmat(std::istream& in);
QuaternionMatrix read_qmat(const std::filesystem::path& path);

}  // namespace qmc
