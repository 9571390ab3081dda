#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <vector>

#include "qmc/quaternion_matrix.hpp"

namespace qmc {

/// Observed-entry set of an M x N matrix (true = observed).
class Mask {
 public:
  Mask() = default;
  /// All entries observed.
  Mask(Index rows, Index cols);
  /// Row-major flags; throws std::invalid_argument if the size is not rows * cols.
  Mask(Index rows, Index cols, std::vector<std::uint8_t> observed);

  Index rows() const { return rows_; }
  Index cols() const { return cols_; }
  bool observed(Index r, Index c) const { return observed_[index(r, c)] != 0; }
  void set_observed(Index r, Index c, bool value) { observed_[index(r, c)] = value ? 1 : 0; }
  Index observed_count() const;
  Index missing_count() const { return rows_ * cols_ - observed_count(); }

  /// Keeps observed entries (all four components) and zeroes the rest.
  QuaternionMatrix project(const QuaternionMatrix& x) const;
  /// Keeps unobserved entries and zeroes the observed ones.
  QuaternionMatrix project_complement(const QuaternionMatrix& x) const;
  /// Entries of `observed_values` on the mask, entries of `fill` elsewhere.
  QuaternionMatrix merge(const QuaternionMatrix& observed_values, const QuaternionMatrix& fill) const;

  /// 1.0 on observed entries, 0.0 elsewhere.
  RealPlane indicator() const;
  const std::vector<std::uint8_t>& flags() const { return observed_; }

  friend bool operator==(const Mask&, const Mask&) = default;

 private:
  std::size_t index(Index r, Index c) const { return static_cast<std::size_t>(r * cols_ + c); }
  void require_shape(const QuaternionMatrix& x) const;

  Index rows_ = 0;
  Index cols_ = 0;
  std::vector<std::uint8_t> observed_;
};

/// Drops exactly round(missing_ratio * rows * cols) entries, chosen uniformly
/// without replacement by a generator seeded with `seed`. Throws
/// std::invalid_argument unless 0 <= missing_ratio <= 1.
Mask random_mask(Index rows, Index cols, double missing_ratio, std::uint64_t seed);

// QMSK layout: "QMSK", u8 version (1), u32 LE rows, u32 LE cols, then
// ceil(rows * cols / 8) bytes of row-major flags; entry t lives in bit
// (t % 8) of byte t / 8 (least significant bit first), 1 = observed.
inline constexpr std::uint8_t kQmskVersion = 1;

void write_qmsk(std::ostream& out, const Mask& mask);
void write_qmsk(const std::filesystem::path& path, const Mask& mask);
Mask read_qmsk(std::istream& in);
Mask read_qmsk(const std::filesystem::path& path);

}  // namespace qmc
