#include "qmc/qdct.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace qmc {
namespace {

void require_dims(const QdctContext& ctx, const QuaternionMatrix& a, const char* op) {
  if (a.rows() != ctx.rows() || a.cols() != ctx.cols()) {
    throw std::invalid_argument(std::string(op) + ": expected " + std::to_string(ctx.rows()) +
                                "x" + std::to_string(ctx.cols()) + ", got " +
                                std::to_string(a.rows()) + "x" + std::to_string(a.cols()));
  }
}

// The DCT is real-linear, so transforming the real and imaginary parts of
// both Cayley-Dickson components is the same as transforming each plane.
QuaternionMatrix transform_planes(const RealPlane& left, const QuaternionMatrix& a,
                                  const RealPlane& right_t) {
  QuaternionMatrix out(a.rows(), a.cols());
  for (int p = 0; p < 4; ++p) out.plane(p).noalias() = left * a.plane(p) * right_t;
  return out;
}

}  // namespace

Quaternion QdctContext::default_axis() {
  const double c = 1.0 / std::sqrt(3.0);
  return {0.0, c, c, c};
}

QdctContext::QdctContext(Index rows, Index cols, Quaternion axis)
    : rows_(rows), cols_(cols), axis_(axis) {
  if (rows < 1 || cols < 1) throw std::invalid_argument("QdctContext: empty dimensions");
  if (std::abs(axis.w) > 1e-12 || std::abs(modulus(axis) - 1.0) > 1e-12) {
    throw std::invalid_argument("QdctContext: quaternionization factor must be a pure unit quaternion");
  }
  row_basis_ = dct_basis(rows);
  col_basis_ = dct_basis(cols);
}

RealPlane dct_basis(Index n) {
  RealPlane c(n, n);
  const double dn = static_cast<double>(n);
  for (Index s = 0; s < n; ++s) {
    const double psi = s == 0 ? std::sqrt(1.0 / dn) : std::sqrt(2.0 / dn);
    for (Index m = 0; m < n; ++m) {
      c(s, m) = psi * std::cos(std::numbers::pi * static_cast<double>((2 * m + 1) * s) / (2.0 * dn));
    }
  }
  return c;
}

QuaternionMatrix fqdct_l(const QdctContext& ctx, const QuaternionMatrix& a) {
  require_dims(ctx, a, "fqdct_l");
  const QuaternionMatrix spectrum =
      transform_planes(ctx.row_basis(), a, ctx.col_basis().transpose());
  return left_multiply(ctx.axis(), spectrum);
}

QuaternionMatrix iqdct_l(const QdctContext& ctx, const QuaternionMatrix& b) {
  require_dims(ctx, b, "iqdct_l");
  // axis^-1 = -axis for a pure unit quaternion.
  const QuaternionMatrix unrotated = left_multiply(-ctx.axis(), b);
  return transform_planes(ctx.row_basis().transpose(), unrotated, ctx.col_basis());
}

}  // namespace qmc
