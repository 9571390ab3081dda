#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string_view>
#include <vector>

#include "qmc/mask.hpp"
#include "qmc/qlinalg.hpp"
#include "qmc/quaternion_matrix.hpp"

namespace qmc {

enum class Method { QlnmQqr, IrqlnmQqr, QlnmQqrSr };

/// "qlnm-qqr", "irqlnm-qqr", "qlnm-qqr-sr".
std::string_view method_name(Method m);
std::optional<Method> parse_method(std::string_view name);

struct SolverConfig {
  Method method = Method::QlnmQqr;
  Index rank = 0;  ///< required, 1 <= rank <= min(M, N)
  double mu0 = 0.003;
  double rho = 1.05;
  double mu_max = 1e7;
  double beta = 0.5;      ///< sparse weight (QLNM-QQR-SR)
  double varsigma = 10.0;  ///< final weight of the schedule (IRQLNM-QQR)
  Index v = 3;             ///< number of unit weights (IRQLNM-QQR)
  double tol = 1e-6;  ///< bound on both the relative change and the primal residual
  int max_iter = 300;
  /// (i + j + k) / sqrt(3)
  Quaternion qdct_axis{0.0, 0.57735026918962573, 0.57735026918962573, 0.57735026918962573};
  std::uint64_t seed = 0;

  /// Per-method defaults: QLNM-QQR mu0 = 0.003, rho = 1.05;
  /// IRQLNM-QQR mu0 = 0.003, rho = 1, varsigma = 10, v = 3;
  /// QLNM-QQR-SR mu0 = 0.5, beta = 0.5, rho = 1.05.
  static SolverConfig defaults_for(Method m);
};

/// Rank presets, tuned on 256 x 256 images, for missing ratios
/// 0.85, 0.75, 0.65 and 0.5:
///   qlnm-qqr 65, 90, 105, 125; irqlnm-qqr 115, 125, 155, 170;
///   qlnm-qqr-sr 60, 85, 100, 120.
/// Returns nullopt for any other ratio (matched within 1e-9).
std::optional<Index> preset_rank(Method m, double missing_ratio);

/// preset_rank scaled by min(rows, cols) / 256, rounded half away from zero
/// and clamped to [1, min(rows, cols)].
std::optional<Index> scaled_preset_rank(Method m, double missing_ratio, Index rows, Index cols);

/// Throws ConfigError describing the first violated constraint.
void validate(const SolverConfig& cfg, Index rows, Index cols);

/// Column weights of the reweighted D update.
struct WeightSchedule {
  RealVector omega;  ///< nondecreasing, first v entries equal 1
  RealVector a_hat;  ///< 1 / omega
};

/// omega_l = 1 for l <= v, omega_l = (varsigma - 1) / (r - v) + omega_{l-1}
/// afterwards. Throws std::invalid_argument unless varsigma > 1 and 1 < v < r.
WeightSchedule make_weight_schedule(Index r, double varsigma, Index v);

struct IterationRecord {
  int iteration = 0;
  double relative_change = 0.0;  ///< ||X^{t+1} - X^t||_F / max(1, ||X^t||_F)
  double primal_residual = 0.0;  ///< ||X^{t+1} - L D R||_F / max(1, ||X^{t+1}||_F)
  double mu = 0.0;               ///< penalty used during the iteration
  double seconds = 0.0;
};

struct SolverReport {
  Method method = Method::QlnmQqr;
  int iterations = 0;
  bool converged = false;
  std::vector<IterationRecord> history;
  TriFactor factors;
  QuaternionMatrix d_hat;  ///< last unshrunk core l^H X_b rfac^H
  QuaternionMatrix x;
  QuaternionMatrix sparse_coefficients;  ///< C (QLNM-QQR-SR only)
};

/// Snapshot handed to an observer after every iteration.
struct IterationState {
  int iteration;
  double mu;       ///< penalty used during the iteration
  double mu_next;  ///< penalty for the next iteration
  const QuaternionMatrix& x;
  const TriFactor& factors;
  const QuaternionMatrix& d_hat;
  const RealVector& column_scaling;  ///< diagonal applied to d_hat
};

struct SolveOptions {
  std::function<void(const IterationState&)> observer;
  /// Replaces the schedule derived from (rank, varsigma, v) in IRQLNM-QQR.
  std::optional<WeightSchedule> schedule;
};

/// L2,1 minimization with QQR-based tri-factorization.
SolverReport qlnm_qqr_complete(const QuaternionMatrix& observed, const Mask& mask,
                               const SolverConfig& cfg, const SolveOptions& options = {});

/// Iteratively reweighted variant; the core is rescaled column-wise by a_hat.
SolverReport irqlnm_qqr_complete(const QuaternionMatrix& observed, const Mask& mask,
                                 const SolverConfig& cfg, const SolveOptions& options = {});

/// Adds an L1 penalty on the left-handed QDCT coefficients.
SolverReport qlnm_qqr_sr_complete(const QuaternionMatrix& observed, const Mask& mask,
                                  const SolverConfig& cfg, const SolveOptions& options = {});

/// Dispatches on cfg.method.
SolverReport complete(const QuaternionMatrix& observed, const Mask& mask, const SolverConfig& cfg,
                      const SolveOptions& options = {});

}  // namespace qmc
