#pragma once

#include "qmc/quaternion_matrix.hpp"

namespace qmc {

/// Left-handed quaternion DCT for a fixed matrix size and quaternionization
/// factor. The factor must be a pure unit quaternion (so factor^2 = -1).
class QdctContext {
 public:
  /// Default factor (i + j + k) / sqrt(3).
  static Quaternion default_axis();

  /// Throws std::invalid_argument if `axis` is not pure with unit modulus
  /// (tolerance 1e-12) or a dimension is < 1.
  QdctContext(Index rows, Index cols, Quaternion axis = default_axis());

  Index rows() const { return rows_; }
  Index cols() const { return cols_; }
  const Quaternion& axis() const { return axis_; }

  /// Orthonormal DCT-II basis, entry (s, m) = psi(s) cos(pi (2m + 1) s / 2M).
  const RealPlane& row_basis() const { return row_basis_; }
  const RealPlane& col_basis() const { return col_basis_; }

 private:
  Index rows_;
  Index cols_;
  Quaternion axis_;
  RealPlane row_basis_;
  RealPlane col_basis_;
};

/// Forward left-handed QDCT: Cayley-Dickson split, 2-D orthonormal DCT-II of
/// both complex parts, reassembly, then left multiplication by the factor.
QuaternionMatrix fqdct_l(const QdctContext& ctx, const QuaternionMatrix& a);

/// Exact inverse of fqdct_l (left multiplication by the factor's inverse,
/// then the inverse 2-D DCT of both complex parts).
QuaternionMatrix iqdct_l(const QdctContext& ctx, const QuaternionMatrix& b);

/// Orthonormal DCT-II matrix of size n.
RealPlane dct_basis(Index n);

}  // namespace qmc
