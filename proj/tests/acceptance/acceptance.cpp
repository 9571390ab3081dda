// Acceptance suite: one PASS/FAIL line per criterion. Exit status is the
// number of failed criteria (capped at 1). `acceptance 3 7` runs a subset.

#include "cli.hpp"
#include "oracles.hpp"

#include <qmc/imaging.hpp>
#include <qmc/mask.hpp>
#include <qmc/prox.hpp>
#include <qmc/qdct.hpp>
#include <qmc/qlinalg.hpp>
#include <qmc/solvers.hpp>
#include <qmc/synthetic.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <random>
#include <set>
#include <sstream>
#include <string>

using namespace qmc;
using qmc::testing::max_abs_diff;
using qmc::testing::orthonormality_error;
using qmc::testing::random_matrix;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* format, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, format, args...);
  return buf;
}

Index uniform(std::mt19937_64& rng, Index lo, Index hi) {
  return std::uniform_int_distribution<Index>(lo, hi)(rng);
}

double rel(double err, double scale) { return err / std::max(scale, 1e-300); }

double relative_error(const QuaternionMatrix& x, const QuaternionMatrix& truth) {
  return frobenius_norm(x - truth) / frobenius_norm(truth);
}

// ---------------------------------------------------------------- 1

Outcome algebra_suite() {
  const auto t0 = Clock::now();
  Outcome o;

  // Basis products e_a e_b = sign * e_c.
  const int idx[4][4] = {{0, 1, 2, 3}, {1, 0, 3, 2}, {2, 3, 0, 1}, {3, 2, 1, 0}};
  const double sgn[4][4] = {{1, 1, 1, 1}, {1, -1, 1, -1}, {1, -1, -1, 1}, {1, 1, -1, -1}};
  auto unit = [](int a) {
    Quaternion q;
    (a == 0 ? q.w : a == 1 ? q.x : a == 2 ? q.y : q.z) = 1.0;
    return q;
  };
  int table_mismatches = 0;
  for (int a = 0; a < 4; ++a) {
    for (int b = 0; b < 4; ++b) {
      Quaternion expected = unit(idx[a][b]);
      expected = expected * sgn[a][b];
      if (!(unit(a) * unit(b) == expected)) ++table_mismatches;
    }
  }
  if (table_mismatches != 0) o.pass = false;

  std::mt19937_64 rng(101);
  double homo = 0.0, oracle = 0.0, ratio = 0.0, cd = 0.0, chi_rt = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    const Index m = uniform(rng, 1, 32), k = uniform(rng, 1, 32), n = uniform(rng, 1, 32);
    const QuaternionMatrix a = random_matrix(m, k, rng);
    const QuaternionMatrix b = random_matrix(k, n, rng);
    const QuaternionMatrix ab = matmul(a, b);
    const ComplexMatrix ca = to_equivalent_complex(a), cb = to_equivalent_complex(b);
    homo = std::max(homo, rel((to_equivalent_complex(ab) - ca * cb).norm(), ca.norm() * cb.norm()));
    oracle = std::max(oracle, rel(frobenius_norm(ab - qmc::testing::naive_matmul(a, b)),
                                  frobenius_norm(a) * frobenius_norm(b)));
    ratio = std::max(ratio, std::abs(ca.norm() / frobenius_norm(a) - std::sqrt(2.0)));
    cd = std::max(cd, rel(frobenius_norm(from_cayley_dickson(cayley_dickson_a(a),
                                                             cayley_dickson_b(a)) - a),
                          frobenius_norm(a)));
    chi_rt = std::max(chi_rt, rel(frobenius_norm(from_equivalent_complex(ca) - a),
                                  frobenius_norm(a)));
  }
  const double worst = std::max({homo, oracle, ratio, cd, chi_rt});
  const double secs = seconds_since(t0);
  o.pass = o.pass && worst <= 1e-10 && secs < 5.0;
  o.detail = fmt("table mismatches %d; chi(AB) %.1e, oracle %.1e, norm ratio %.1e, "
                 "round trips %.1e / %.1e; %.2f s",
                 table_mismatches, homo, oracle, ratio, cd, chi_rt, secs);
  return o;
}

// ---------------------------------------------------------------- 2

Outcome factorization_suite() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(202);
  double orth = 0.0, qr_rec = 0.0, tri = 0.0, svd_rec = 0.0, pairing = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const Index m = uniform(rng, 1, 64), n = uniform(rng, 1, 48);
    const QuaternionMatrix a = random_matrix(m, n, rng);
    const double na = frobenius_norm(a);

    const QqrResult qr = qqr(a);
    orth = std::max(orth, orthonormality_error(qr.q));
    qr_rec = std::max(qr_rec, rel(frobenius_norm(matmul(qr.q, qr.r) - a), na));
    for (Index i = 0; i < qr.r.rows(); ++i) {
      for (Index j = 0; j < std::min(i, qr.r.cols()); ++j) tri = std::max(tri, modulus(qr.r(i, j)));
      if (i < qr.r.cols()) {
        const Quaternion d = qr.r(i, i);
        if (d.w < 0.0) tri = std::max(tri, -d.w);
        tri = std::max(tri, std::hypot(d.x, d.y, d.z));
      }
    }

    const QsvdResult sv = qsvd(a);
    svd_rec = std::max(
        svd_rec, rel(frobenius_norm(times_adjoint(scale_columns(sv.u, sv.sigma), sv.v) - a), na));
    const RealVector chi = qmc::testing::complex_spectrum_oracle(a);
    for (Index s = 0; s < sv.sigma.size(); ++s) {
      pairing = std::max(pairing, rel(std::abs(chi(2 * s) - sv.sigma(s)) +
                                          std::abs(chi(2 * s + 1) - sv.sigma(s)),
                                      chi(0)));
    }
  }
  const double secs = seconds_since(t0);
  Outcome o;
  o.pass = orth <= 1e-10 && qr_rec <= 1e-9 && tri == 0.0 && svd_rec <= 1e-8 && pairing <= 1e-8 &&
           secs < 30.0;
  o.detail = fmt("QhQ-I %.1e, QR rec %.1e, below-diag/phase %.1e, QSVD rec %.1e, "
                 "pairing %.1e; %.2f s",
                 orth, qr_rec, tri, svd_rec, pairing, secs);
  return o;
}

// ---------------------------------------------------------------- 3

Outcome cqsvd_vs_qsvd() {
  std::mt19937_64 rng(303);
  double worst = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const QuaternionMatrix x = random_matrix(8, 6, rng);
    const TriFactor tf = cqsvd_qqr(x, 4, 200, 1e-14);
    const RealVector d = tf.diagonal_moduli();
    const RealVector sigma = qsvd(x).sigma;
    for (Index s = 0; s < 4; ++s) worst = std::max(worst, std::abs(d(s) - sigma(s)));
  }
  return {worst <= 1e-6, fmt("max ||d_ss| - sigma_s| %.2e over 20 instances", worst)};
}

// ---------------------------------------------------------------- 4

Outcome nuclear_below_l21() {
  std::mt19937_64 rng(404);
  double slack = INFINITY;
  for (int trial = 0; trial < 500; ++trial) {
    const Index m = uniform(rng, 1, 24), n = uniform(rng, 1, 24);
    QuaternionMatrix a;
    switch (trial % 3) {
      case 0:
        a = random_matrix(m, n, rng);
        break;
      case 1:
        a = matmul(random_matrix(m, 1 + trial % 4, rng), random_matrix(1 + trial % 4, n, rng));
        break;
      default: {
        RealVector s(n);
        for (Index j = 0; j < n; ++j) s(j) = std::pow(10.0, uniform(rng, -3, 3));
        a = scale_columns(random_matrix(m, n, rng), s);
      }
    }
    slack = std::min(slack, l21_norm(a) - nuclear_norm(a));
  }
  return {slack >= -1e-9, fmt("min(l21 - nuclear) = %.3e over 500 matrices", slack)};
}

// ---------------------------------------------------------------- 5

Outcome prox_oracles() {
  std::mt19937_64 rng(505);
  double obj_gap = 0.0, svt = 0.0, factor4 = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    const Index m = uniform(rng, 1, 12), n = uniform(rng, 1, 12);
    const QuaternionMatrix y = random_matrix(m, n, rng);
    const double beta = std::uniform_real_distribution<double>(0.01, 0.6)(rng);

    // Columnwise objective 4 beta ||x|| + 1/2 ||x - y||^2 along x = t y.
    const QuaternionMatrix x = l21_prox(y, beta).value;
    const RealVector ny = column_norms(y), nx = column_norms(x);
    double got = 0.0, best = 0.0;
    for (Index j = 0; j < n; ++j) {
      const double s = ny(j);
      auto f = [&](double t) { return 4.0 * beta * t * s + 0.5 * (1.0 - t) * (1.0 - t) * s * s; };
      best += f(qmc::testing::golden_section(f, 0.0, 1.0));
    }
    got = 4.0 * beta * nx.sum() + 0.5 * std::pow(frobenius_norm(x - y), 2);
    obj_gap = std::max(obj_gap, std::abs(got - best));

    const double mu = std::uniform_real_distribution<double>(0.0, 3.0)(rng);
    const RealVector sigma = singular_values(y);
    const RealVector shrunk = singular_values(qsvt_prox(y, mu));
    for (Index s = 0; s < sigma.size(); ++s) {
      svt = std::max(svt, std::abs(shrunk(s) - std::max(sigma(s) - mu, 0.0)));
    }

    const double mu2 = std::uniform_real_distribution<double>(0.1, 5.0)(rng);
    factor4 = std::max(
        factor4,
        max_abs_diff(weighted_l21_prox(y, RealVector::Constant(n, 4.0 * beta * mu2), mu2), x));
  }
  return {obj_gap <= 1e-6 && svt <= 1e-8 && factor4 <= 1e-10,
          fmt("l21 objective gap %.1e, svt spectrum %.1e, factor-4 identity %.1e", obj_gap, svt,
              factor4)};
}

// ---------------------------------------------------------------- 6

Outcome qdct_suite() {
  std::mt19937_64 rng(606);
  double rt = 0.0, parseval = 0.0, direct = 0.0;
  for (auto [m, n] : {std::pair<Index, Index>{8, 8}, {16, 16}, {13, 40}, {64, 64}}) {
    const QdctContext ctx(m, n);
    const QuaternionMatrix a = random_matrix(m, n, rng);
    const QuaternionMatrix b = fqdct_l(ctx, a);
    const double na = frobenius_norm(a);
    rt = std::max(rt, rel(frobenius_norm(iqdct_l(ctx, b) - a), na));
    parseval = std::max(parseval, rel(std::abs(frobenius_norm(b) - na), na));
  }
  for (const Quaternion& axis : {QdctContext::default_axis(), Quaternion(0, 1, 0, 0),
                                 Quaternion(0, 0, 0.6, 0.8)}) {
    const QdctContext ctx(8, 8, axis);
    const QuaternionMatrix a = random_matrix(8, 8, rng);
    direct = std::max(direct, max_abs_diff(fqdct_l(ctx, a), qmc::testing::direct_qdct(a, axis)));
  }
  return {rt <= 1e-10 && parseval <= 1e-10 && direct <= 1e-9,
          fmt("round trip %.1e, Parseval %.1e, direct sum (8x8) %.1e", rt, parseval, direct)};
}

// ---------------------------------------------------------------- 7

Outcome solver_invariants() {
  struct Instance {
    Index rows, cols, rank, r;
    double mr;
    std::uint64_t seed;
  };
  const Instance instances[] = {{32, 24, 3, 6, 0.5, 1}, {40, 40, 5, 10, 0.7, 2}};
  int fidelity = 0, monotone = 0, shrink = 0, nondet = 0, runs = 0, iterations = 0;
  double orth = 0.0;
  for (const Instance& in : instances) {
    const QuaternionMatrix truth = random_low_rank(in.rows, in.cols, in.rank, in.seed, 10.0);
    const Mask mask = random_mask(in.rows, in.cols, in.mr, in.seed + 100);
    const QuaternionMatrix observed = mask.project(truth);
    for (Method m : {Method::QlnmQqr, Method::IrqlnmQqr, Method::QlnmQqrSr}) {
      SolverConfig cfg = SolverConfig::defaults_for(m);
      cfg.rank = in.r;
      cfg.max_iter = 150;
      double last_mu = 0.0;
      SolveOptions opt;
      opt.observer = [&](const IterationState& s) {
        ++iterations;
        if (!(mask.project(s.x) == observed)) ++fidelity;
        orth = std::max({orth, orthonormality_error(s.factors.l),
                         orthonormality_error(conj_transpose(s.factors.rfac))});
        if (s.mu < last_mu || s.mu_next < s.mu || s.mu_next > cfg.mu_max) ++monotone;
        last_mu = s.mu;
        if (s.column_scaling.size() > 0 &&
            (s.column_scaling.minCoeff() < 0.0 || s.column_scaling.maxCoeff() > 1.0)) {
          ++shrink;
        }
      };
      const SolverReport a = complete(observed, mask, cfg, opt);
      const SolverReport b = complete(observed, mask, cfg);
      if (!(a.x == b.x) || !(a.factors.d == b.factors.d) ||
          a.iterations != b.iterations) {
        ++nondet;
      }
      ++runs;
    }
  }
  return {fidelity == 0 && monotone == 0 && shrink == 0 && nondet == 0 && orth <= 1e-8,
          fmt("%d runs, %d iterations: fidelity violations %d, orthonormality %.1e, mu "
              "violations %d, shrinkage out of [0,1] %d, nondeterministic runs %d",
              runs, iterations, fidelity, orth, monotone, shrink, nondet)};
}

// ---------------------------------------------------------------- 8

Outcome synthetic_recovery() {
  const auto t0 = Clock::now();
  const QuaternionMatrix truth = random_low_rank(64, 64, 5, 11, 10.0);
  const Mask mask = random_mask(64, 64, 0.5, 3);
  SolverConfig cq = SolverConfig::defaults_for(Method::QlnmQqr);
  cq.rank = 10;
  const SolverReport q = qlnm_qqr_complete(mask.project(truth), mask, cq);
  const double eq = relative_error(q.x, truth);

  SolverConfig ci = SolverConfig::defaults_for(Method::IrqlnmQqr);
  ci.rank = 10;
  ci.v = 5;
  const double ei = relative_error(irqlnm_qqr_complete(mask.project(truth), mask, ci).x, truth);

  const QdctContext ctx(64, 64);
  const SparseSpectrumInstance inst = qdct_sparse_low_rank(ctx, 8, 0.1, 5, 10.0);
  const Mask mask2 = random_mask(64, 64, 0.75, 4);
  SolverConfig cb = SolverConfig::defaults_for(Method::QlnmQqr);
  cb.rank = 8;
  SolverConfig cs = SolverConfig::defaults_for(Method::QlnmQqrSr);
  cs.rank = 8;
  const double base = relative_error(qlnm_qqr_complete(mask2.project(inst.matrix), mask2, cb).x,
                                     inst.matrix);
  const double sparse = relative_error(
      qlnm_qqr_sr_complete(mask2.project(inst.matrix), mask2, cs).x, inst.matrix);
  const double secs = seconds_since(t0);

  return {eq <= 5e-2 && q.iterations <= 300 && ei <= eq + 1e-3 && sparse < base && secs < 120.0,
          fmt("qlnm-qqr err %.2e in %d it; irqlnm-qqr (v=5) err %.2e; sparse-spectrum "
              "instance: sr %.3e vs qlnm %.3e; %.1f s",
              eq, q.iterations, ei, sparse, base, secs)};
}

// ---------------------------------------------------------------- 9

Outcome photo_trend() {
  const ColorImage img = read_png(std::string(QMC_TEST_DATA_DIR) + "/astronaut_128.png");
  const QuaternionMatrix truth = image_to_quaternion(img);
  bool pass = true;
  std::ostringstream detail;
  for (double mr : {0.5, 0.85}) {
    const Mask mask = random_mask(img.height(), img.width(), mr, 1);
    const QuaternionMatrix observed = mask.project(truth);
    double p[3];
    for (int i = 0; i < 3; ++i) {
      const Method m = static_cast<Method>(i);
      SolverConfig cfg = SolverConfig::defaults_for(m);
      cfg.rank = *scaled_preset_rank(m, mr, img.height(), img.width());
      p[i] = psnr(img, quaternion_to_image(complete(observed, mask, cfg).x));
    }
    const bool ok = p[2] > p[1] && p[1] >= p[0] - 0.1;
    pass = pass && ok;
    detail << fmt("MR %.0f%%: sr %.2f, irqlnm %.2f, qlnm %.2f dB%s; ", 100 * mr, p[2], p[1], p[0],
                  ok ? "" : " (order violated)");
  }
  std::string d = detail.str();
  d.resize(d.size() - 2);
  return {pass, d};
}

// ---------------------------------------------------------------- 10

Outcome complexity() {
  const cli::BenchRow small = cli::bench_size(256, 16, 15, 0);
  const cli::BenchRow large = cli::bench_size(512, 16, 15, 0);
  const double ratio = large.median_iter_ms / small.median_iter_ms;
  return {ratio <= 3.0, fmt("median iteration 256: %.2f ms, 512: %.2f ms, ratio %.2f (bound 3)",
                            small.median_iter_ms, large.median_iter_ms, ratio)};
}

}  // namespace

int main(int argc, char** argv) {
  struct Criterion {
    int id;
    const char* name;
    std::function<Outcome()> run;
  };
  const Criterion criteria[] = {
      {1, "algebra suite", algebra_suite},
      {2, "factorization suite", factorization_suite},
      {3, "cqsvd-qqr vs qsvd", cqsvd_vs_qsvd},
      {4, "nuclear norm <= l21 norm", nuclear_below_l21},
      {5, "prox oracles", prox_oracles},
      {6, "qdct", qdct_suite},
      {7, "solver invariants", solver_invariants},
      {8, "synthetic recovery", synthetic_recovery},
      {9, "photo psnr ordering", photo_trend},
      {10, "per-iteration scaling", complexity},
  };
  std::set<int> only;
  for (int i = 1; i < argc; ++i) only.insert(std::atoi(argv[i]));

  int failed = 0;
  for (const Criterion& c : criteria) {
    if (!only.empty() && !only.count(c.id)) continue;
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    if (!o.pass) ++failed;
    std::printf("[%s] %2d %s: %s\n", o.pass ? "PASS" : "FAIL", c.id, c.name, o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d criteria failed\n", failed);
  return failed == 0 ? 0 : 1;
}
