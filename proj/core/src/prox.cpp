#include "qmc/prox.hpp"

#include <stdexcept>
#include <string>

#include "qmc/qlinalg.hpp"

namespace qmc {
namespace {

QuaternionMatrix rebuild(const QsvdResult& svd, const RealVector& sigma) {
  return times_adjoint(scale_columns(svd.u, sigma), svd.v);
}

}  // namespace

ColumnShrinkage column_shrinkage(const RealVector& column_norms, const RealVector& thresholds) {
  ColumnShrinkage out{RealVector::Zero(column_norms.size())};
  for (Index n = 0; n < column_norms.size(); ++n) {
    const double norm = column_norms(n);
    if (norm > thresholds(n)) out.coefficients(n) = (norm - thresholds(n)) / norm;
  }
  return out;
}

L21ProxResult l21_prox(const QuaternionMatrix& y, double beta) {
  if (!(beta >= 0.0)) throw std::invalid_argument("l21_prox: beta must be nonnegative");
  ColumnShrinkage shrink =
      column_shrinkage(column_norms(y), RealVector::Constant(y.cols(), 4.0 * beta));
  QuaternionMatrix value = scale_columns(y, shrink.coefficients);
  return {std::move(value), std::move(shrink)};
}

QuaternionMatrix weighted_l21_prox(const QuaternionMatrix& y, const RealVector& weights,
                                   double mu) {
  if (weights.size() != y.cols()) {
    throw std::invalid_argument("weighted_l21_prox: " + std::to_string(weights.size()) +
                                " weights for " + std::to_string(y.cols()) + " columns");
  }
  if (!(mu > 0.0)) throw std::invalid_argument("weighted_l21_prox: mu must be positive");
  if ((weights.array() < 0.0).any()) {
    throw std::invalid_argument("weighted_l21_prox: weights must be nonnegative");
  }
  const ColumnShrinkage shrink = column_shrinkage(column_norms(y), weights / mu);
  return scale_columns(y, shrink.coefficients);
}

QuaternionMatrix qsvt_prox(const QuaternionMatrix& y, double mu) {
  if (!(mu >= 0.0)) throw std::invalid_argument("qsvt_prox: mu must be nonnegative");
  const QsvdResult svd = qsvd(y);
  return rebuild(svd, (svd.sigma.array() - mu).max(0.0).matrix());
}

QuaternionMatrix weighted_qsvt_prox(const QuaternionMatrix& y, const RealVector& weights,
                                    double mu) {
  const Index k = std::min(y.rows(), y.cols());
  if (weights.size() != k) {
    throw std::invalid_argument("weighted_qsvt_prox: expected " + std::to_string(k) +
                                " weights, got " + std::to_string(weights.size()));
  }
  if (!(mu >= 0.0)) throw std::invalid_argument("weighted_qsvt_prox: mu must be nonnegative");
  for (Index l = 0; l < k; ++l) {
    if (weights(l) < 0.0 || (l > 0 && weights(l) < weights(l - 1))) {
      throw std::invalid_argument(
          "weighted_qsvt_prox: weights must be nonnegative and nondecreasing");
    }
  }
  const QsvdResult svd = qsvd(y);
  return rebuild(svd, (svd.sigma.array() - mu * weights.array()).max(0.0).matrix());
}

QuaternionMatrix soft_threshold_elementwise(const QuaternionMatrix& y, double t) {
  if (!(t >= 0.0)) throw std::invalid_argument("soft_threshold_elementwise: t must be nonnegative");
  const RealPlane mod = (y.w().array().square() + y.x().array().square() +
                         y.y().array().square() + y.z().array().square())
                            .sqrt()
                            .matrix();
  // Scale factor max(|x| - t, 0) / |x|, defined as 0 where |x| = 0.
  const RealPlane factor =
      (mod.array() > t).select((mod.array() - t) / mod.array(), 0.0).matrix();
  QuaternionMatrix out = y;
  for (int p = 0; p < 4; ++p) out.plane(p) = out.plane(p).cwiseProduct(factor);
  return out;
}

}  // namespace qmc
