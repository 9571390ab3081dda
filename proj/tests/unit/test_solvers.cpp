#include <gtest/gtest.h>

#include <qmc/errors.hpp>
#include <qmc/prox.hpp>
#include <qmc/qdct.hpp>
#include <qmc/solvers.hpp>
#include <qmc/synthetic.hpp>

#include <cmath>
#include <random>
#include <sstream>

#include "oracles.hpp"

namespace qmc {
namespace {

using testing::orthonormality_error;

double relative_error(const QuaternionMatrix& x, const QuaternionMatrix& truth) {
  return frobenius_norm(x - truth) / frobenius_norm(truth);
}

SolverConfig config(Method m, Index rank) {
  SolverConfig cfg = SolverConfig::defaults_for(m);
  cfg.rank = rank;
  return cfg;
}

// ---- Mask -------------------------------------------------------------------

TEST(Mask, RandomMaskCounts) {
  EXPECT_EQ(random_mask(10, 10, 0.0, 1).observed_count(), 100);
  EXPECT_EQ(random_mask(10, 10, 0.5, 1).observed_count(), 50);
  EXPECT_EQ(random_mask(256, 256, 0.85, 3).observed_count(), 9830);
  EXPECT_EQ(random_mask(7, 3, 1.0, 1).observed_count(), 0);
  EXPECT_THROW(random_mask(4, 4, 1.5, 1), std::invalid_argument);
  EXPECT_THROW(random_mask(4, 4, -0.1, 1), std::invalid_argument);
}

TEST(Mask, SeededDeterminism) {
  EXPECT_EQ(random_mask(16, 16, 0.5, 1), random_mask(16, 16, 0.5, 1));
  EXPECT_NE(random_mask(16, 16, 0.5, 1), random_mask(16, 16, 0.5, 2));
}

TEST(Mask, ProjectionIdentities) {
  std::mt19937_64 rng(1);
  const QuaternionMatrix x = testing::random_matrix(9, 7, rng);
  const Mask mask = random_mask(9, 7, 0.4, 5);
  const QuaternionMatrix p = mask.project(x);
  EXPECT_EQ(mask.project(p), p);
  EXPECT_EQ(p + mask.project_complement(x), x);
  for (Index r = 0; r < 9; ++r) {
    for (Index c = 0; c < 7; ++c) {
      if (!mask.observed(r, c)) EXPECT_EQ(p(r, c), Quaternion());
    }
  }
  EXPECT_THROW(mask.project(QuaternionMatrix(9, 6)), std::invalid_argument);
}

TEST(Mask, QmskRoundTrip) {
  const Mask mask = random_mask(5, 3, 0.4, 9);
  std::stringstream buf;
  write_qmsk(buf, mask);
  const std::string bytes = buf.str();
  ASSERT_EQ(bytes.size(), 4u + 1u + 8u + 2u);
  EXPECT_EQ(bytes.substr(0, 4), "QMSK");
  int bit0 = static_cast<unsigned char>(bytes[13]) & 1;
  EXPECT_EQ(bit0 != 0, mask.observed(0, 0));
  std::stringstream in(bytes);
  EXPECT_EQ(read_qmsk(in), mask);
  std::string bad = bytes;
  bad[1] = 'X';
  std::stringstream in_bad(bad);
  EXPECT_THROW(read_qmsk(in_bad), FormatError);
}

// ---- Config and weights -------------------------------------------------------

TEST(SolverConfig, MethodDefaults) {
  const SolverConfig a = SolverConfig::defaults_for(Method::QlnmQqr);
  EXPECT_EQ(a.mu0, 0.003);
  EXPECT_EQ(a.rho, 1.05);
  const SolverConfig b = SolverConfig::defaults_for(Method::IrqlnmQqr);
  EXPECT_EQ(b.mu0, 0.003);
  EXPECT_EQ(b.rho, 1.0);
  EXPECT_EQ(b.varsigma, 10.0);
  EXPECT_EQ(b.v, 3);
  const SolverConfig c = SolverConfig::defaults_for(Method::QlnmQqrSr);
  EXPECT_EQ(c.mu0, 0.5);
  EXPECT_EQ(c.beta, 0.5);
  EXPECT_EQ(c.rho, 1.05);
  EXPECT_EQ(a.mu_max, 1e7);
  EXPECT_EQ(a.tol, 1e-6);
  EXPECT_EQ(a.max_iter, 300);
}

TEST(SolverConfig, MethodNames) {
  for (Method m : {Method::QlnmQqr, Method::IrqlnmQqr, Method::QlnmQqrSr}) {
    EXPECT_EQ(parse_method(method_name(m)), m);
  }
  EXPECT_FALSE(parse_method("svt").has_value());
}

TEST(SolverConfig, Validation) {
  SolverConfig cfg = config(Method::QlnmQqr, 4);
  EXPECT_NO_THROW(validate(cfg, 8, 6));
  cfg.rank = 7;
  EXPECT_THROW(validate(cfg, 8, 6), ConfigError);
  cfg.rank = 0;
  EXPECT_THROW(validate(cfg, 8, 6), ConfigError);
  cfg = config(Method::QlnmQqr, 4);
  cfg.rho = 0.9;
  EXPECT_THROW(validate(cfg, 8, 6), ConfigError);
  cfg = config(Method::QlnmQqr, 4);
  cfg.mu0 = 0.0;
  EXPECT_THROW(validate(cfg, 8, 6), ConfigError);
  cfg = config(Method::IrqlnmQqr, 3);
  EXPECT_THROW(validate(cfg, 8, 6), ConfigError);  // v = 3 is not below r = 3
  cfg.rank = 4;
  cfg.varsigma = 1.0;
  EXPECT_THROW(validate(cfg, 8, 6), ConfigError);
  cfg = config(Method::QlnmQqrSr, 4);
  cfg.beta = -1.0;
  EXPECT_THROW(validate(cfg, 8, 6), ConfigError);
  cfg.beta = 0.5;
  cfg.qdct_axis = Quaternion(0, 1, 1, 0);
  EXPECT_THROW(validate(cfg, 8, 6), ConfigError);
}

TEST(WeightSchedule, Recurrence) {
  const WeightSchedule ws = make_weight_schedule(5, 10.0, 3);
  RealVector omega(5);
  omega << 1, 1, 1, 5.5, 10;
  EXPECT_LT((ws.omega - omega).cwiseAbs().maxCoeff(), 1e-14);
  RealVector a_hat(5);
  a_hat << 1, 1, 1, 1 / 5.5, 0.1;
  EXPECT_LT((ws.a_hat - a_hat).cwiseAbs().maxCoeff(), 1e-14);

  const WeightSchedule near_one = make_weight_schedule(6, 1.0 + 1e-12, 2);
  EXPECT_LT((near_one.a_hat - RealVector::Ones(6)).cwiseAbs().maxCoeff(), 1e-11);

  const WeightSchedule single = make_weight_schedule(4, 2.0, 3);
  EXPECT_DOUBLE_EQ(single.omega(3), 2.0);
  EXPECT_DOUBLE_EQ(single.a_hat(3), 0.5);

  EXPECT_THROW(make_weight_schedule(4, 10.0, 4), std::invalid_argument);
  EXPECT_THROW(make_weight_schedule(4, 1.0, 2), std::invalid_argument);
  EXPECT_THROW(make_weight_schedule(4, 10.0, 1), std::invalid_argument);
}

// ---- Solver behaviour --------------------------------------------------------

class AllMethods : public ::testing::TestWithParam<Method> {};

SolverConfig small_config(Method m) {
  SolverConfig cfg = config(m, 4);
  if (m == Method::IrqlnmQqr) cfg.v = 2;
  return cfg;
}

TEST_P(AllMethods, FullyObservedReturnsInputAfterOneIteration) {
  const QuaternionMatrix truth = random_low_rank(12, 10, 3, 4, 10.0);
  SolverConfig cfg = small_config(GetParam());
  cfg.max_iter = 1;
  const SolverReport rep = complete(truth, Mask(12, 10), cfg);
  EXPECT_EQ(rep.iterations, 1);
  EXPECT_EQ(rep.x, truth);
}

TEST_P(AllMethods, ZeroObservationsStayZero) {
  const SolverReport rep =
      complete(QuaternionMatrix(10, 10), random_mask(10, 10, 0.5, 2), small_config(GetParam()));
  EXPECT_EQ(frobenius_norm(rep.x), 0.0);
}

TEST_P(AllMethods, InvariantsHoldEveryIteration) {
  const Method m = GetParam();
  const QuaternionMatrix truth = random_low_rank(20, 16, 3, 7, 10.0);
  const Mask mask = random_mask(20, 16, 0.5, 8);
  const QuaternionMatrix observed = mask.project(truth);
  SolverConfig cfg = small_config(m);
  cfg.max_iter = 60;

  int calls = 0;
  double last_mu = 0.0;
  SolveOptions opt;
  opt.observer = [&](const IterationState& s) {
    ++calls;
    EXPECT_EQ(mask.project(s.x), observed) << "iteration " << s.iteration;
    EXPECT_LE(orthonormality_error(s.factors.l), 1e-8);
    EXPECT_LE(orthonormality_error(conj_transpose(s.factors.rfac)), 1e-8);
    EXPECT_GE(s.mu, last_mu);
    EXPECT_GE(s.mu_next, s.mu);
    EXPECT_LE(s.mu_next, cfg.mu_max);
    last_mu = s.mu;
    ASSERT_EQ(s.column_scaling.size(), cfg.rank);
    EXPECT_GE(s.column_scaling.minCoeff(), 0.0);
    EXPECT_LE(s.column_scaling.maxCoeff(), 1.0);
  };
  const SolverReport rep = complete(truth, mask, cfg, opt);
  EXPECT_EQ(calls, rep.iterations);
  EXPECT_EQ(mask.project(rep.x), observed);
}

TEST_P(AllMethods, SeededRunsAreBitIdentical) {
  const QuaternionMatrix truth = random_low_rank(16, 16, 3, 9, 10.0);
  const Mask mask = random_mask(16, 16, 0.4, 10);
  SolverConfig cfg = small_config(GetParam());
  cfg.max_iter = 40;
  const SolverReport a = complete(truth, mask, cfg);
  const SolverReport b = complete(truth, mask, cfg);
  EXPECT_EQ(a.x, b.x);
  EXPECT_EQ(a.factors.d, b.factors.d);
  ASSERT_EQ(a.history.size(), b.history.size());
  for (std::size_t t = 0; t < a.history.size(); ++t) {
    EXPECT_EQ(a.history[t].relative_change, b.history[t].relative_change);
  }
}

TEST_P(AllMethods, RejectsMismatchedInputs) {
  const SolverConfig cfg = small_config(GetParam());
  EXPECT_THROW(complete(QuaternionMatrix(8, 8), Mask(8, 7), cfg), ConfigError);
  SolverConfig bad = cfg;
  bad.rank = 9;
  EXPECT_THROW(complete(QuaternionMatrix(8, 8), Mask(8, 8), bad), ConfigError);
}

INSTANTIATE_TEST_SUITE_P(Solvers, AllMethods,
                         ::testing::Values(Method::QlnmQqr, Method::IrqlnmQqr,
                                           Method::QlnmQqrSr),
                         [](const auto& info) {
                           std::string name(method_name(info.param));
                           std::erase(name, '-');
                           return name;
                         });

TEST(QlnmQqr, RecoversLowRankMatrix) {
  const QuaternionMatrix truth = random_low_rank(64, 64, 5, 11, 10.0);
  const Mask mask = random_mask(64, 64, 0.5, 3);
  const SolverReport rep = qlnm_qqr_complete(truth, mask, config(Method::QlnmQqr, 10));
  EXPECT_LE(rep.iterations, 300);
  EXPECT_LE(relative_error(rep.x, truth), 5e-2);
}

TEST(IrqlnmQqr, AtLeastAsAccurateAsQlnm) {
  const QuaternionMatrix truth = random_low_rank(64, 64, 5, 11, 10.0);
  const Mask mask = random_mask(64, 64, 0.5, 3);
  const double base = relative_error(qlnm_qqr_complete(truth, mask, config(Method::QlnmQqr, 10)).x,
                                     truth);
  SolverConfig cfg = config(Method::IrqlnmQqr, 10);
  cfg.v = 5;
  const double reweighted = relative_error(irqlnm_qqr_complete(truth, mask, cfg).x, truth);
  EXPECT_LE(reweighted, base + 1e-3);
}

TEST(IrqlnmQqr, UnitScheduleLeavesCoreUnscaled) {
  const QuaternionMatrix truth = random_low_rank(16, 16, 2, 12, 10.0);
  const Mask mask = random_mask(16, 16, 0.3, 13);
  SolverConfig cfg = config(Method::IrqlnmQqr, 4);
  cfg.max_iter = 30;
  SolveOptions opt;
  opt.schedule = WeightSchedule{RealVector::Ones(4), RealVector::Ones(4)};
  opt.observer = [&](const IterationState& s) {
    EXPECT_EQ(s.factors.d, s.d_hat);
    EXPECT_EQ(s.column_scaling, RealVector::Ones(4));
  };
  const SolverReport rep = irqlnm_qqr_complete(truth, mask, cfg, opt);
  EXPECT_EQ(mask.project(rep.x), mask.project(truth));

  opt.schedule = WeightSchedule{RealVector::Ones(3), RealVector::Ones(3)};
  EXPECT_THROW(irqlnm_qqr_complete(truth, mask, cfg, opt), ConfigError);
}

TEST(IrqlnmQqr, ConvergedCoreIsWeightedThresholdFixedPoint) {
  const QuaternionMatrix truth = random_low_rank(16, 16, 3, 14, 10.0);
  const Mask mask = random_mask(16, 16, 0.3, 15);
  SolverConfig cfg = config(Method::IrqlnmQqr, 4);
  cfg.v = 3;
  cfg.max_iter = 3000;
  cfg.tol = 1e-12;
  const SolverReport rep = irqlnm_qqr_complete(truth, mask, cfg);
  const WeightSchedule ws = make_weight_schedule(4, cfg.varsigma, cfg.v);

  // Weights mu (1 - a_l) sigma_l(d_hat) with mu = 1 turn the weighted
  // threshold into the column scaling a_l.
  const RealVector sigma = singular_values(rep.d_hat);
  const RealVector w = (RealVector::Ones(4) - ws.a_hat).cwiseProduct(sigma);
  const RealVector prox_sigma = singular_values(weighted_qsvt_prox(rep.d_hat, w, 1.0));
  const RealVector d = rep.factors.diagonal_moduli();
  for (Index l = 0; l < 4; ++l) EXPECT_NEAR(d(l), prox_sigma(l), 1e-4) << "l = " << l;
}

TEST(QlnmQqrSr, ZeroBetaIsWellDefined) {
  const QuaternionMatrix truth = random_low_rank(16, 16, 2, 16, 10.0);
  const Mask mask = random_mask(16, 16, 0.3, 17);
  SolverConfig cfg = config(Method::QlnmQqrSr, 3);
  cfg.beta = 0.0;
  cfg.max_iter = 1;
  const SolverReport rep = qlnm_qqr_sr_complete(truth, mask, cfg);
  // With C = F = 0 before the first step the coefficient update is the plain transform.
  const QdctContext ctx(16, 16);
  EXPECT_LT(testing::max_abs_diff(rep.sparse_coefficients, fqdct_l(ctx, rep.x)), 1e-12);
  cfg.max_iter = 100;
  const SolverReport longer = qlnm_qqr_sr_complete(truth, mask, cfg);
  EXPECT_TRUE(std::isfinite(frobenius_norm(longer.x)));
}

TEST(QlnmQqrSr, BeatsQlnmOnSparseSpectrum) {
  const QdctContext ctx(64, 64);
  const SparseSpectrumInstance inst = qdct_sparse_low_rank(ctx, 8, 0.1, 5, 10.0);
  const Mask mask = random_mask(64, 64, 0.75, 4);
  const double base =
      relative_error(qlnm_qqr_complete(inst.matrix, mask, config(Method::QlnmQqr, 8)).x,
                     inst.matrix);
  const double sparse =
      relative_error(qlnm_qqr_sr_complete(inst.matrix, mask, config(Method::QlnmQqrSr, 8)).x,
                     inst.matrix);
  EXPECT_LT(sparse, base);
}

}  // namespace
}  // namespace qmc
