#pragma once

#include "qmc/quaternion_matrix.hpp"

namespace qmc {

/// Per-column scaling factors applied by the L2,1 proximal operators, each in [0, 1].
struct ColumnShrinkage {
  RealVector coefficients;
};

struct L21ProxResult {
  QuaternionMatrix value;
  ColumnShrinkage shrinkage;
};

/// Shrinkage coefficients (||y_n|| - threshold)_+ / ||y_n||, with 0 for zero columns.
ColumnShrinkage column_shrinkage(const RealVector& column_norms, const RealVector& thresholds);

/// argmin_X beta ||X||_{2,1} + 1/2 ||X - Y||_F^2 under the quaternion-derivative
/// convention, whose column threshold is 4 beta. Throws std::invalid_argument
/// for beta < 0.
L21ProxResult l21_prox(const QuaternionMatrix& y, double beta);

/// Weighted L2,1 shrinkage: column m is scaled by (s_m - w_m / mu)_+ / s_m with
/// s_m = ||Y(:, m)||. Throws std::invalid_argument if weights.size() != cols,
/// any weight is negative, or mu <= 0.
QuaternionMatrix weighted_l21_prox(const QuaternionMatrix& y, const RealVector& weights, double mu);

/// Quaternion singular value thresholding U diag((sigma - mu)_+) V^H.
QuaternionMatrix qsvt_prox(const QuaternionMatrix& y, double mu);

/// Weighted thresholding U diag((sigma_l - mu w_l)_+) V^H. Weights must be
/// nonnegative and nondecreasing (length min(M, N)); otherwise
/// std::invalid_argument is thrown.
QuaternionMatrix weighted_qsvt_prox(const QuaternionMatrix& y, const RealVector& weights, double mu);

/// Entry-wise x -> (x / |x|) max(|x| - t, 0).
QuaternionMatrix soft_threshold_elementwise(const QuaternionMatrix& y, double t);

}  // namespace qmc
