#pragma once

#include "qmc/quaternion_matrix.hpp"

namespace qmc {

/// Thin quaternion QR, A = q * r.
struct QqrResult {
  QuaternionMatrix q;  ///< M x k with orthonormal columns, k = min(M, N)
  QuaternionMatrix r;  ///< k x N upper triangular, real nonnegative diagonal
};

/// Householder QR over the quaternion division ring. The phase of every
/// pivot is moved into q so that r has a real, nonnegative diagonal.
/// Rank-deficient columns produce zero pivots; no pivoting is performed.
QqrResult qqr(const QuaternionMatrix& a);

/// Thin quaternion SVD, A = u * diag(sigma) * v^H.
struct QsvdResult {
  QuaternionMatrix u;  ///< M x k, orthonormal columns
  RealVector sigma;    ///< length k, nonincreasing, nonnegative
  QuaternionMatrix v;  ///< N x k, orthonormal columns
};

/// Computes the SVD of the equivalent complex matrix and collapses each pair
/// of repeated singular values into one quaternion singular triplet.
QsvdResult qsvd(const QuaternionMatrix& a);

/// All 2 min(M, N) singular values of the equivalent complex matrix, sorted
/// in decreasing order (each quaternion singular value appears twice).
RealVector equivalent_complex_singular_values(const QuaternionMatrix& a);

/// Quaternion singular values only (every other value of the complex spectrum).
RealVector singular_values(const QuaternionMatrix& a);

double nuclear_norm(const QuaternionMatrix& a);

/// Rank-r tri-factorization X ~ l * d * rfac maintained by CQSVD-QQR.
struct TriFactor {
  QuaternionMatrix l;     ///< M x r, l^H l = I
  QuaternionMatrix d;     ///< r x r, lower triangular
  QuaternionMatrix rfac;  ///< r x N, rfac rfac^H = I
  Index target_rank = 0;

  /// eye(M, r), eye(r, r), eye(r, N).
  static TriFactor identity(Index rows, Index cols, Index rank);

  /// Moduli of the diagonal of d.
  RealVector diagonal_moduli() const;
  QuaternionMatrix product() const;
};

/// One alternating sweep: l from qqr(X rfac^H), then rfac and d from
/// qqr(X^H l). Throws std::invalid_argument on mismatched shapes.
TriFactor cqsvd_qqr_step(const QuaternionMatrix& x, const TriFactor& tf);

/// Iterates cqsvd_qqr_step from the identity initialization until the max
/// change of |d_ss| falls below `tol` (relative to |d_11|) or `max_iter`
/// sweeps were performed. Throws std::invalid_argument unless
/// 1 <= rank <= min(M, N).
TriFactor cqsvd_qqr(const QuaternionMatrix& x, Index rank, int max_iter = 200,
                    double tol = 1e-12);

}  // namespace qmc
