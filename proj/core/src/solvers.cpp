#include "qmc/solvers.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <string>

#include "qmc/errors.hpp"
#include "qmc/prox.hpp"
#include "qmc/qdct.hpp"

namespace qmc {
namespace {

using Clock = std::chrono::steady_clock;

// Shared ADMM state. The low-rank block (steps updating L, R, D) is common to
// all three methods; they differ in the core scaling and the X update.
struct AdmmState {
  QuaternionMatrix observed;  // P_Omega(M)
  QuaternionMatrix x;
  QuaternionMatrix e;  // multiplier of X = L D R
  TriFactor tf;
  QuaternionMatrix d_hat;
  QuaternionMatrix ldr;  // L D R of the current iteration
  RealVector scaling;
  double mu = 0.0;
};

AdmmState init_state(const QuaternionMatrix& observed, const Mask& mask, const SolverConfig& cfg) {
  AdmmState s;
  s.observed = mask.project(observed);
  s.x = s.observed;
  s.e = QuaternionMatrix(observed.rows(), observed.cols());
  s.tf = TriFactor::identity(observed.rows(), observed.cols(), cfg.rank);
  s.mu = cfg.mu0;
  return s;
}

void check_inputs(const QuaternionMatrix& observed, const Mask& mask, const SolverConfig& cfg,
                  Method expected) {
  if (cfg.method != expected) {
    throw ConfigError("solver called with config for method " +
                      std::string(method_name(cfg.method)));
  }
  if (mask.rows() != observed.rows() || mask.cols() != observed.cols()) {
    throw ConfigError("mask dimensions do not match the observed matrix");
  }
  validate(cfg, observed.rows(), observed.cols());
}

// L and R by one warm-started CQSVD-QQR sweep on X_b = X + E / mu.
void update_factors(AdmmState& s) {
  QuaternionMatrix xb(s.x.rows(), s.x.cols());
  const double inv_mu = 1.0 / s.mu;
  for (int p = 0; p < 4; ++p) xb.plane(p).noalias() = s.x.plane(p) + inv_mu * s.e.plane(p);
  s.tf = cqsvd_qqr_step(xb, s.tf);
  s.d_hat = s.tf.d;
}

// ||a - b||_F without forming the difference.
double distance(const QuaternionMatrix& a, const QuaternionMatrix& b) {
  double sum = 0.0;
  for (int p = 0; p < 4; ++p) sum += (a.plane(p) - b.plane(p)).squaredNorm();
  return std::sqrt(sum);
}

double relative_change(const QuaternionMatrix& next, const QuaternionMatrix& prev) {
  return distance(next, prev) / std::max(1.0, frobenius_norm(prev));
}

double primal_residual(const QuaternionMatrix& x, const QuaternionMatrix& ldr) {
  return distance(x, ldr) / std::max(1.0, frobenius_norm(x));
}

// Runs the outer loop; `step` performs the method-specific part of one
// iteration after L, R and d_hat are refreshed, returning the new X and
// leaving L D R in s.ldr. Stops once X has stalled and satisfies X = L D R:
// a stalled X alone is not enough, since an early shrinkage that zeroes the
// whole core leaves X untouched while the multiplier keeps moving.
template <typename Step>
SolverReport run(AdmmState& s, const SolverConfig& cfg, const SolveOptions& options, Step step) {
  SolverReport report;
  report.method = cfg.method;
  report.history.reserve(static_cast<std::size_t>(cfg.max_iter));
  for (int it = 1; it <= cfg.max_iter; ++it) {
    const auto start = Clock::now();
    update_factors(s);
    QuaternionMatrix x_next = step(s);
    const double change = relative_change(x_next, s.x);
    const double residual = primal_residual(x_next, s.ldr);
    s.x = std::move(x_next);

    const double mu_used = s.mu;
    const double mu_next = std::min(cfg.rho * s.mu, cfg.mu_max);
    const double seconds = std::chrono::duration<double>(Clock::now() - start).count();
    report.history.push_back({it, change, residual, mu_used, seconds});
    report.iterations = it;
    if (options.observer) {
      options.observer(IterationState{it, mu_used, mu_next, s.x, s.tf, s.d_hat, s.scaling});
    }
    s.mu = mu_next;
    if (change < cfg.tol && residual < cfg.tol) {
      report.converged = true;
      break;
    }
  }
  report.factors = s.tf;
  report.d_hat = s.d_hat;
  report.x = s.x;
  return report;
}

// E <- E + mu (X - L D R).
void update_multiplier(AdmmState& s, const QuaternionMatrix& x_next, const QuaternionMatrix& ldr) {
  for (int p = 0; p < 4; ++p) s.e.plane(p) += s.mu * (x_next.plane(p) - ldr.plane(p));
}

}  // namespace

std::string_view method_name(Method m) {
  switch (m) {
    case Method::QlnmQqr:
      return "qlnm-qqr";
    case Method::IrqlnmQqr:
      return "irqlnm-qqr";
    case Method::QlnmQqrSr:
      return "qlnm-qqr-sr";
  }
  return "unknown";
}

std::optional<Method> parse_method(std::string_view name) {
  for (Method m : {Method::QlnmQqr, Method::IrqlnmQqr, Method::QlnmQqrSr}) {
    if (method_name(m) == name) return m;
  }
  return std::nullopt;
}

SolverConfig SolverConfig::defaults_for(Method m) {
  SolverConfig cfg;
  cfg.method = m;
  switch (m) {
    case Method::QlnmQqr:
      cfg.mu0 = 0.003;
      cfg.rho = 1.05;
      break;
    case Method::IrqlnmQqr:
      cfg.mu0 = 0.003;
      cfg.rho = 1.0;
      cfg.varsigma = 10.0;
      cfg.v = 3;
      break;
    case Method::QlnmQqrSr:
      cfg.mu0 = 0.5;
      cfg.beta = 0.5;
      cfg.rho = 1.05;
      break;
  }
  return cfg;
}

std::optional<Index> preset_rank(Method m, double missing_ratio) {
  static constexpr double kRatios[4] = {0.85, 0.75, 0.65, 0.5};
  static constexpr Index kRanks[3][4] = {
      {65, 90, 105, 125},
      {115, 125, 155, 170},
      {60, 85, 100, 120},
  };
  for (int t = 0; t < 4; ++t) {
    if (std::abs(missing_ratio - kRatios[t]) <= 1e-9) return kRanks[static_cast<int>(m)][t];
  }
  return std::nullopt;
}

std::optional<Index> scaled_preset_rank(Method m, double missing_ratio, Index rows, Index cols) {
  const std::optional<Index> base = preset_rank(m, missing_ratio);
  if (!base) return std::nullopt;
  const Index side = std::min(rows, cols);
  const auto scaled = static_cast<Index>(
      std::llround(static_cast<double>(*base) * static_cast<double>(side) / 256.0));
  return std::clamp<Index>(scaled, 1, side);
}

void validate(const SolverConfig& cfg, Index rows, Index cols) {
  const Index max_rank = std::min(rows, cols);
  if (cfg.rank < 1 || cfg.rank > max_rank) {
    throw ConfigError("rank must lie in [1, " + std::to_string(max_rank) + "], got " +
                      std::to_string(cfg.rank));
  }
  if (!(cfg.mu0 > 0.0)) throw ConfigError("mu0 must be positive");
  if (!(cfg.rho >= 1.0)) throw ConfigError("rho must be at least 1");
  if (!(cfg.mu_max >= cfg.mu0)) throw ConfigError("mu_max must be at least mu0");
  if (!(cfg.tol >= 0.0)) throw ConfigError("tol must be nonnegative");
  if (cfg.max_iter < 1) throw ConfigError("max_iter must be at least 1");
  if (cfg.method == Method::IrqlnmQqr) {
    if (!(cfg.varsigma > 1.0)) throw ConfigError("varsigma must exceed 1");
    if (cfg.v <= 1 || cfg.v >= cfg.rank) throw ConfigError("v must satisfy 1 < v < rank");
  }
  if (cfg.method == Method::QlnmQqrSr) {
    if (!(cfg.beta >= 0.0)) throw ConfigError("beta must be nonnegative");
    const Quaternion& a = cfg.qdct_axis;
    if (std::abs(a.w) > 1e-12 || std::abs(modulus(a) - 1.0) > 1e-12) {
      throw ConfigError("qdct_axis must be a pure unit quaternion");
    }
  }
}

WeightSchedule make_weight_schedule(Index r, double varsigma, Index v) {
  if (!(varsigma > 1.0)) throw std::invalid_argument("make_weight_schedule: varsigma must exceed 1");
  if (v <= 1 || v >= r) throw std::invalid_argument("make_weight_schedule: need 1 < v < r");
  WeightSchedule ws{RealVector::Ones(r), RealVector::Ones(r)};
  const double step = (varsigma - 1.0) / static_cast<double>(r - v);
  for (Index l = v; l < r; ++l) ws.omega(l) = step + ws.omega(l - 1);
  ws.a_hat = ws.omega.cwiseInverse();
  return ws;
}

SolverReport qlnm_qqr_complete(const QuaternionMatrix& observed, const Mask& mask,
                               const SolverConfig& cfg, const SolveOptions& options) {
  check_inputs(observed, mask, cfg, Method::QlnmQqr);
  AdmmState s = init_state(observed, mask, cfg);
  return run(s, cfg, options, [&](AdmmState& st) {
    // Column shrinkage of the core with beta = 1 / mu, i.e. threshold 4 / mu.
    L21ProxResult prox = l21_prox(st.d_hat, 1.0 / st.mu);
    st.scaling = prox.shrinkage.coefficients;
    st.tf.d = std::move(prox.value);
    st.ldr = st.tf.product();
    const QuaternionMatrix& ldr = st.ldr;
    QuaternionMatrix x_next = mask.merge(st.observed, ldr);
    update_multiplier(st, x_next, ldr);
    return x_next;
  });
}

SolverReport irqlnm_qqr_complete(const QuaternionMatrix& observed, const Mask& mask,
                                 const SolverConfig& cfg, const SolveOptions& options) {
  check_inputs(observed, mask, cfg, Method::IrqlnmQqr);
  const WeightSchedule schedule = options.schedule
                                      ? *options.schedule
                                      : make_weight_schedule(cfg.rank, cfg.varsigma, cfg.v);
  if (schedule.a_hat.size() != cfg.rank) {
    throw ConfigError("weight schedule length " + std::to_string(schedule.a_hat.size()) +
                      " does not match rank " + std::to_string(cfg.rank));
  }
  AdmmState s = init_state(observed, mask, cfg);
  return run(s, cfg, options, [&](AdmmState& st) {
    st.scaling = schedule.a_hat;
    st.tf.d = scale_columns(st.d_hat, schedule.a_hat);
    st.ldr = st.tf.product();
    const QuaternionMatrix& ldr = st.ldr;
    QuaternionMatrix x_next = mask.merge(st.observed, ldr);
    update_multiplier(st, x_next, ldr);
    return x_next;
  });
}

SolverReport qlnm_qqr_sr_complete(const QuaternionMatrix& observed, const Mask& mask,
                                  const SolverConfig& cfg, const SolveOptions& options) {
  check_inputs(observed, mask, cfg, Method::QlnmQqrSr);
  const QdctContext ctx(observed.rows(), observed.cols(), cfg.qdct_axis);
  AdmmState s = init_state(observed, mask, cfg);
  QuaternionMatrix c(observed.rows(), observed.cols());  // sparse QDCT coefficients
  QuaternionMatrix f(observed.rows(), observed.cols());  // multiplier of C = T(X)
  SolverReport report = run(s, cfg, options, [&](AdmmState& st) {
    L21ProxResult prox = l21_prox(st.d_hat, 1.0 / st.mu);
    st.scaling = prox.shrinkage.coefficients;
    st.tf.d = std::move(prox.value);
    st.ldr = st.tf.product();
    const QuaternionMatrix& ldr = st.ldr;
    const double inv_mu = 1.0 / st.mu;

    // X = P_Omega(M) + P_Omega^c(1/2 (L D R - E / mu + I(C + F / mu))).
    QuaternionMatrix blend = ldr - st.e * inv_mu + iqdct_l(ctx, c + f * inv_mu);
    blend *= 0.5;
    QuaternionMatrix x_next = mask.merge(st.observed, blend);

    // C = S_{4 beta / mu}(T(X) - F / mu), then both multipliers.
    const QuaternionMatrix tx = fqdct_l(ctx, x_next);
    c = soft_threshold_elementwise(tx - f * inv_mu, 4.0 * cfg.beta * inv_mu);
    update_multiplier(st, x_next, ldr);
    f += (c - tx) * st.mu;
    return x_next;
  });
  report.sparse_coefficients = std::move(c);
  return report;
}

SolverReport complete(const QuaternionMatrix& observed, const Mask& mask, const SolverConfig& cfg,
                      const SolveOptions& options) {
  switch (cfg.method) {
    case Method::QlnmQqr:
      return qlnm_qqr_complete(observed, mask, cfg, options);
    case Method::IrqlnmQqr:
      return irqlnm_qqr_complete(observed, mask, cfg, options);
    case Method::QlnmQqrSr:
      return qlnm_qqr_sr_complete(observed, mask, cfg, options);
  }
  throw ConfigError("unknown method");
}

}  // namespace qmc
