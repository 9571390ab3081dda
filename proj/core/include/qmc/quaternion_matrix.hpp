#pragma once

#include <Eigen/Core>
#include <array>
#include <complex>
#include <cstdint>

#include "qmc/quaternion.hpp"

namespace qmc {

using Index = Eigen::Index;
using RealPlane = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using ComplexMatrix = Eigen::Matrix<std::complex<double>, Eigen::Dynamic, Eigen::Dynamic>;
using RealVector = Eigen::VectorXd;

/// Dense M x N quaternion matrix stored as four real planes
/// Q = Q0 + Q1 i + Q2 j + Q3 k (row-major, 0-based indices).
class QuaternionMatrix {
 public:
  QuaternionMatrix() = default;
  /// Zero matrix.
  QuaternionMatrix(Index rows, Index cols);
  /// Takes ownership of the four planes; throws std::invalid_argument when
  /// their shapes differ.
  QuaternionMatrix(RealPlane w, RealPlane x, RealPlane y, RealPlane z);

  /// Real rectangular identity, eye(rows, cols).
  static QuaternionMatrix identity(Index rows, Index cols);
  /// Pure quaternion matrix 0 + x i + y j + z k.
  static QuaternionMatrix pure(RealPlane x, RealPlane y, RealPlane z);

  Index rows() const { return planes_[0].rows(); }
  Index cols() const { return planes_[0].cols(); }
  Index size() const { return rows() * cols(); }

  const RealPlane& plane(int p) const { return planes_[static_cast<std::size_t>(p)]; }
  RealPlane& plane(int p) { return planes_[static_cast<std::size_t>(p)]; }
  const RealPlane& w() const { return planes_[0]; }
  const RealPlane& x() const { return planes_[1]; }
  const RealPlane& y() const { return planes_[2]; }
  const RealPlane& z() const { return planes_[3]; }

  Quaternion operator()(Index r, Index c) const {
    return {planes_[0](r, c), planes_[1](r, c), planes_[2](r, c), planes_[3](r, c)};
  }
  void set(Index r, Index c, const Quaternion& q) {
    planes_[0](r, c) = q.w;
    planes_[1](r, c) = q.x;
    planes_[2](r, c) = q.y;
    planes_[3](r, c) = q.z;
  }

  bool is_pure() const { return (planes_[0].array() == 0.0).all(); }
  bool same_shape(const QuaternionMatrix& o) const {
    return rows() == o.rows() && cols() == o.cols();
  }

  /// Copy of the sub-block starting at (row, col).
  QuaternionMatrix block(Index row, Index col, Index rows, Index cols) const;
  QuaternionMatrix left_cols(Index n) const { return block(0, 0, rows(), n); }
  QuaternionMatrix column(Index c) const { return block(0, c, rows(), 1); }

  QuaternionMatrix& operator+=(const QuaternionMatrix& o);
  QuaternionMatrix& operator-=(const QuaternionMatrix& o);
  QuaternionMatrix& operator*=(double s);

  /// Exact, plane-wise equality.
  friend bool operator==(const QuaternionMatrix& a, const QuaternionMatrix& b) {
    return a.same_shape(b) && a.planes_[0] == b.planes_[0] && a.planes_[1] == b.planes_[1] &&
           a.planes_[2] == b.planes_[2] && a.planes_[3] == b.planes_[3];
  }

 private:
  std::array<RealPlane, 4> planes_{RealPlane(0, 0), RealPlane(0, 0), RealPlane(0, 0),
                                   RealPlane(0, 0)};
};

QuaternionMatrix operator+(QuaternionMatrix a, const QuaternionMatrix& b);
QuaternionMatrix operator-(QuaternionMatrix a, const QuaternionMatrix& b);
QuaternionMatrix operator*(QuaternionMatrix a, double s);
QuaternionMatrix operator*(double s, QuaternionMatrix a);

/// Quaternion matrix product; throws std::invalid_argument when a.cols() != b.rows().
QuaternionMatrix matmul(const QuaternionMatrix& a, const QuaternionMatrix& b);
inline QuaternionMatrix operator*(const QuaternionMatrix& a, const QuaternionMatrix& b) {
  return matmul(a, b);
}

/// Product a^H b without materializing the conjugate transpose.
QuaternionMatrix adjoint_times(const QuaternionMatrix& a, const QuaternionMatrix& b);
/// Product a b^H without materializing the conjugate transpose.
QuaternionMatrix times_adjoint(const QuaternionMatrix& a, const QuaternionMatrix& b);

QuaternionMatrix conj_transpose(const QuaternionMatrix& a);

/// Entry-wise left multiplication q * A(m, n).
QuaternionMatrix left_multiply(const Quaternion& q, const QuaternionMatrix& a);
/// Scales column n by s[n].
QuaternionMatrix scale_columns(const QuaternionMatrix& a, const RealVector& s);

double frobenius_norm(const QuaternionMatrix& a);
/// Euclidean norm of each column's entry moduli.
RealVector column_norms(const QuaternionMatrix& a);
/// Sum over columns of the column Euclidean norms.
double l21_norm(const QuaternionMatrix& a);
/// Sum of entry moduli.
double l1_norm(const QuaternionMatrix& a);

/// Cayley-Dickson equivalent complex matrix [[Qa, Qb], [-conj(Qb), conj(Qa)]]
/// with Qa = Q0 + Q1 i and Qb = Q2 + Q3 i.
ComplexMatrix to_equivalent_complex(const QuaternionMatrix& q);

/// Inverse of to_equivalent_complex. Throws std::invalid_argument if `c` has odd
/// dimensions or its lower block row deviates from the required symmetry by more
/// than `rel_tol` relative to ||c||_F.
QuaternionMatrix from_equivalent_complex(const ComplexMatrix& c, double rel_tol = 1e-10);

/// Complex parts of the Cayley-Dickson split Q = Qa + Qb j.
ComplexMatrix cayley_dickson_a(const QuaternionMatrix& q);
ComplexMatrix cayley_dickson_b(const QuaternionMatrix& q);
QuaternionMatrix from_cayley_dickson(const ComplexMatrix& qa, const ComplexMatrix& qb);

}  // namespace qmc
