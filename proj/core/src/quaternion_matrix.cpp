#include "qmc/quaternion_matrix.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace qmc {
namespace {

std::string shape(const QuaternionMatrix& a) {
  return std::to_string(a.rows()) + "x" + std::to_string(a.cols());
}

void require_same_shape(const QuaternionMatrix& a, const QuaternionMatrix& b, const char* op) {
  if (!a.same_shape(b)) {
    throw std::invalid_argument(std::string(op) + ": shape mismatch " + shape(a) + " vs " +
                                shape(b));
  }
}

// Output plane `out` of a Hamilton product accumulates sign * A_in * B_plane.
struct HamiltonTerm {
  int plane;
  double sign;
};
constexpr HamiltonTerm kHamilton[4][4] = {
    {{0, 1.0}, {1, -1.0}, {2, -1.0}, {3, -1.0}},
    {{1, 1.0}, {0, 1.0}, {3, 1.0}, {2, -1.0}},
    {{2, 1.0}, {3, -1.0}, {0, 1.0}, {1, 1.0}},
    {{3, 1.0}, {2, 1.0}, {1, -1.0}, {0, 1.0}},
};

}  // namespace

QuaternionMatrix::QuaternionMatrix(Index rows, Index cols)
    : planes_{RealPlane::Zero(rows, cols), RealPlane::Zero(rows, cols),
              RealPlane::Zero(rows, cols), RealPlane::Zero(rows, cols)} {}

QuaternionMatrix::QuaternionMatrix(RealPlane w, RealPlane x, RealPlane y, RealPlane z)
    : planes_{std::move(w), std::move(x), std::move(y), std::move(z)} {
  for (int p = 1; p < 4; ++p) {
    if (planes_[p].rows() != planes_[0].rows() || planes_[p].cols() != planes_[0].cols()) {
      throw std::invalid_argument("QuaternionMatrix: planes must share dimensions");
    }
  }
}

QuaternionMatrix QuaternionMatrix::identity(Index rows, Index cols) {
  QuaternionMatrix out(rows, cols);
  out.planes_[0].setIdentity();
  return out;
}

QuaternionMatrix QuaternionMatrix::pure(RealPlane x, RealPlane y, RealPlane z) {
  RealPlane w = RealPlane::Zero(x.rows(), x.cols());
  return {std::move(w), std::move(x), std::move(y), std::move(z)};
}

QuaternionMatrix QuaternionMatrix::block(Index row, Index col, Index nrows, Index ncols) const {
  if (row < 0 || col < 0 || nrows < 0 || ncols < 0 || row + nrows > rows() ||
      col + ncols > cols()) {
    throw std::out_of_range("QuaternionMatrix::block out of range");
  }
  return {planes_[0].block(row, col, nrows, ncols), planes_[1].block(row, col, nrows, ncols),
          planes_[2].block(row, col, nrows, ncols), planes_[3].block(row, col, nrows, ncols)};
}

QuaternionMatrix& QuaternionMatrix::operator+=(const QuaternionMatrix& o) {
  require_same_shape(*this, o, "operator+");
  for (int p = 0; p < 4; ++p) planes_[p] += o.planes_[p];
  return *this;
}

QuaternionMatrix& QuaternionMatrix::operator-=(const QuaternionMatrix& o) {
  require_same_shape(*this, o, "operator-");
  for (int p = 0; p < 4; ++p) planes_[p] -= o.planes_[p];
  return *this;
}

QuaternionMatrix& QuaternionMatrix::operator*=(double s) {
  for (auto& plane : planes_) plane *= s;
  return *this;
}

QuaternionMatrix operator+(QuaternionMatrix a, const QuaternionMatrix& b) { return a += b; }
QuaternionMatrix operator-(QuaternionMatrix a, const QuaternionMatrix& b) { return a -= b; }
QuaternionMatrix operator*(QuaternionMatrix a, double s) { return a *= s; }
QuaternionMatrix operator*(double s, QuaternionMatrix a) { return a *= s; }

namespace {

// Sign of plane p under conjugation.
constexpr double conj_sign(int p) { return p == 0 ? 1.0 : -1.0; }

// Signed planes of op(B) arranged so that row block `in`, column block `out`
// multiplies plane `in` of op(A) into output plane `out`.
RealPlane signed_rhs(const QuaternionMatrix& b, bool adj_b, Index k, Index n) {
  RealPlane rhs(4 * k, 4 * n);
  for (int out = 0; out < 4; ++out) {
    for (int in = 0; in < 4; ++in) {
      const HamiltonTerm t = kHamilton[out][in];
      auto block = rhs.block(in * k, out * n, k, n);
      if (adj_b) {
        block = (t.sign * conj_sign(t.plane)) * b.plane(t.plane).transpose();
      } else {
        block = t.sign * b.plane(t.plane);
      }
    }
  }
  return rhs;
}

// op(A) * op(B) where op is the identity or the conjugate transpose. The
// larger operand is never copied: if A dominates, four GEMMs op(A)_in * S(B)_in
// accumulate into a stacked result; otherwise op(A) is stacked as
// [A0 A1 A2 A3] and each output plane is one GEMM against a column block.
QuaternionMatrix hamilton_product(const QuaternionMatrix& a, bool adj_a, const QuaternionMatrix& b,
                                  bool adj_b, const char* op) {
  const Index m = adj_a ? a.cols() : a.rows();
  const Index k = adj_a ? a.rows() : a.cols();
  const Index k_b = adj_b ? b.cols() : b.rows();
  const Index n = adj_b ? b.rows() : b.cols();
  if (k != k_b) {
    throw std::invalid_argument(std::string(op) + ": inner dimensions differ, " + shape(a) +
                                " and " + shape(b));
  }
  if (m == 0 || n == 0 || k == 0) return QuaternionMatrix(m, n);

  const RealPlane rhs = signed_rhs(b, adj_b, k, n);
  if (a.size() > b.size()) {
    RealPlane prod = RealPlane::Zero(m, 4 * n);
    for (int in = 0; in < 4; ++in) {
      const auto rows = rhs.middleRows(in * k, k);
      if (adj_a) {
        prod.noalias() += conj_sign(in) * (a.plane(in).transpose() * rows);
      } else {
        prod.noalias() += a.plane(in) * rows;
      }
    }
    return {prod.middleCols(0, n), prod.middleCols(n, n), prod.middleCols(2 * n, n),
            prod.middleCols(3 * n, n)};
  }

  RealPlane lhs(m, 4 * k);
  for (int in = 0; in < 4; ++in) {
    if (adj_a) {
      lhs.middleCols(in * k, k) = conj_sign(in) * a.plane(in).transpose();
    } else {
      lhs.middleCols(in * k, k) = a.plane(in);
    }
  }
  QuaternionMatrix out(m, n);
  for (int p = 0; p < 4; ++p) out.plane(p).noalias() = lhs * rhs.middleCols(p * n, n);
  return out;
}

}  // namespace

QuaternionMatrix matmul(const QuaternionMatrix& a, const QuaternionMatrix& b) {
  return hamilton_product(a, false, b, false, "matmul");
}

QuaternionMatrix conj_transpose(const QuaternionMatrix& a) {
  return {a.w().transpose(), -a.x().transpose(), -a.y().transpose(), -a.z().transpose()};
}

QuaternionMatrix adjoint_times(const QuaternionMatrix& a, const QuaternionMatrix& b) {
  return hamilton_product(a, true, b, false, "adjoint_times");
}

QuaternionMatrix times_adjoint(const QuaternionMatrix& a, const QuaternionMatrix& b) {
  return hamilton_product(a, false, b, true, "times_adjoint");
}

QuaternionMatrix left_multiply(const Quaternion& q, const QuaternionMatrix& a) {
  const auto& a0 = a.w();
  const auto& a1 = a.x();
  const auto& a2 = a.y();
  const auto& a3 = a.z();
  return {q.w * a0 - q.x * a1 - q.y * a2 - q.z * a3, q.w * a1 + q.x * a0 + q.y * a3 - q.z * a2,
          q.w * a2 - q.x * a3 + q.y * a0 + q.z * a1, q.w * a3 + q.x * a2 - q.y * a1 + q.z * a0};
}

QuaternionMatrix scale_columns(const QuaternionMatrix& a, const RealVector& s) {
  if (s.size() != a.cols()) {
    throw std::invalid_argument("scale_columns: expected " + std::to_string(a.cols()) +
                                " factors, got " + std::to_string(s.size()));
  }
  QuaternionMatrix out = a;
  for (int p = 0; p < 4; ++p) out.plane(p) *= s.asDiagonal();
  return out;
}

double frobenius_norm(const QuaternionMatrix& a) {
  double sum = 0.0;
  for (int p = 0; p < 4; ++p) sum += a.plane(p).squaredNorm();
  return std::sqrt(sum);
}

RealVector column_norms(const QuaternionMatrix& a) {
  RealVector sq = RealVector::Zero(a.cols());
  for (int p = 0; p < 4; ++p) sq += a.plane(p).colwise().squaredNorm().transpose();
  return sq.cwiseSqrt();
}

double l21_norm(const QuaternionMatrix& a) { return column_norms(a).sum(); }

double l1_norm(const QuaternionMatrix& a) {
  const RealPlane mod2 = a.w().array().square() + a.x().array().square() +
                         a.y().array().square() + a.z().array().square();
  return mod2.array().sqrt().sum();
}

ComplexMatrix cayley_dickson_a(const QuaternionMatrix& q) {
  ComplexMatrix out(q.rows(), q.cols());
  out.real() = q.w();
  out.imag() = q.x();
  return out;
}

ComplexMatrix cayley_dickson_b(const QuaternionMatrix& q) {
  ComplexMatrix out(q.rows(), q.cols());
  out.real() = q.y();
  out.imag() = q.z();
  return out;
}

QuaternionMatrix from_cayley_dickson(const ComplexMatrix& qa, const ComplexMatrix& qb) {
  if (qa.rows() != qb.rows() || qa.cols() != qb.cols()) {
    throw std::invalid_argument("from_cayley_dickson: parts differ in shape");
  }
  return {qa.real(), qa.imag(), qb.real(), qb.imag()};
}

ComplexMatrix to_equivalent_complex(const QuaternionMatrix& q) {
  const Index m = q.rows();
  const Index n = q.cols();
  const ComplexMatrix qa = cayley_dickson_a(q);
  const ComplexMatrix qb = cayley_dickson_b(q);
  ComplexMatrix out(2 * m, 2 * n);
  out.topLeftCorner(m, n) = qa;
  out.topRightCorner(m, n) = qb;
  out.bottomLeftCorner(m, n) = -qb.conjugate();
  out.bottomRightCorner(m, n) = qa.conjugate();
  return out;
}

QuaternionMatrix from_equivalent_complex(const ComplexMatrix& c, double rel_tol) {
  if (c.rows() % 2 != 0 || c.cols() % 2 != 0) {
    throw std::invalid_argument("from_equivalent_complex: dimensions must be even");
  }
  const Index m = c.rows() / 2;
  const Index n = c.cols() / 2;
  const ComplexMatrix qa = c.topLeftCorner(m, n);
  const ComplexMatrix qb = c.topRightCorner(m, n);
  const double deviation = std::sqrt((c.bottomLeftCorner(m, n) + qb.conjugate()).squaredNorm() +
                                     (c.bottomRightCorner(m, n) - qa.conjugate()).squaredNorm());
  if (deviation > rel_tol * c.norm()) {
    throw std::invalid_argument(
        "from_equivalent_complex: matrix lacks the [[A, B], [-conj(B), conj(A)]] structure");
  }
  return from_cayley_dickson(qa, qb);
}

}  // namespace qmc
