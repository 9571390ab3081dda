#include "qmc/qlinalg.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace qmc {
namespace {

// Column-major array-of-quaternions scratch used by the Householder kernel.
class QuaternionColumns {
 public:
  explicit QuaternionColumns(const QuaternionMatrix& a)
      : rows_(a.rows()), cols_(a.cols()), data_(static_cast<std::size_t>(rows_ * cols_)) {
    for (Index c = 0; c < cols_; ++c) {
      for (Index r = 0; r < rows_; ++r) at(r, c) = a(r, c);
    }
  }
  QuaternionColumns(Index rows, Index cols)
      : rows_(rows), cols_(cols), data_(static_cast<std::size_t>(rows * cols)) {}

  Quaternion& at(Index r, Index c) { return data_[static_cast<std::size_t>(c * rows_ + r)]; }
  const Quaternion& at(Index r, Index c) const {
    return data_[static_cast<std::size_t>(c * rows_ + r)];
  }
  Quaternion* col(Index c) { return data_.data() + c * rows_; }

  QuaternionMatrix to_matrix(Index rows, Index cols) const {
    QuaternionMatrix out(rows, cols);
    for (Index c = 0; c < cols; ++c) {
      for (Index r = 0; r < rows; ++r) out.set(r, c, at(r, c));
    }
    return out;
  }

 private:
  Index rows_;
  Index cols_;
  std::vector<Quaternion> data_;
};

struct Reflector {
  std::vector<Quaternion> v;  // acts on rows [offset, M)
  Index offset = 0;
  double vnorm2 = 0.0;  // v^H v; zero means identity
};

// y <- (I - 2 v v^H / v^H v) y on rows [offset, offset + v.size()).
void apply_reflector(const Reflector& h, Quaternion* y) {
  if (h.vnorm2 == 0.0) return;
  Quaternion s;
  const auto n = static_cast<Index>(h.v.size());
  for (Index i = 0; i < n; ++i) s += conj(h.v[i]) * y[h.offset + i];
  s *= 2.0 / h.vnorm2;
  for (Index i = 0; i < n; ++i) y[h.offset + i] -= h.v[i] * s;
}

// ---- QSVD helpers on complex vectors of the equivalent complex matrix ----

using ComplexVector = Eigen::VectorXcd;

// Partner vector under the quaternion structure: [c1; c2] -> [-conj(c2); conj(c1)].
ComplexVector j_partner(const ComplexVector& c) {
  const Index h = c.size() / 2;
  ComplexVector out(c.size());
  out.head(h) = -c.tail(h).conjugate();
  out.tail(h) = c.head(h).conjugate();
  return out;
}

// Orthonormal basis closed under j_partner, with an optional linear image
// (the matching right singular vectors) carried along with every element.
class PairedBasis {
 public:
  // Removes the components of `vec` along the basis, applying the same
  // coefficients to `image` when it is non-null.
  void project_out(ComplexVector& vec, ComplexVector* image) const {
    for (std::size_t b = 0; b < basis_.size(); ++b) {
      const std::complex<double> coef = basis_[b].dot(vec);
      vec -= coef * basis_[b];
      if (image != nullptr) *image -= coef * images_[b];
    }
  }

  // Adds u and its partner (and their images).
  void add(const ComplexVector& u, const ComplexVector& u_image) {
    basis_.push_back(u);
    images_.push_back(u_image);
    basis_.push_back(j_partner(u));
    images_.push_back(u_image.size() > 0 ? j_partner(u_image) : ComplexVector());
  }

  // Last two added vectors, for incremental candidate updates.
  std::size_t size() const { return basis_.size(); }
  const ComplexVector& vec(std::size_t b) const { return basis_[b]; }
  const ComplexVector& image(std::size_t b) const { return images_[b]; }

 private:
  std::vector<ComplexVector> basis_;
  std::vector<ComplexVector> images_;
};

struct Candidate {
  ComplexVector left;
  ComplexVector right;  // empty when no image is tracked
  double sigma = 0.0;
  bool consumed = false;
};

// Projects the two most recently added basis vectors out of every live candidate.
void update_candidates(std::vector<Candidate>& cands, const PairedBasis& basis) {
  for (auto& c : cands) {
    if (c.consumed) continue;
    for (std::size_t b = basis.size() - 2; b < basis.size(); ++b) {
      const std::complex<double> coef = basis.vec(b).dot(c.left);
      c.left -= coef * basis.vec(b);
      if (c.right.size() > 0) c.right -= coef * basis.image(b);
    }
  }
}

// Picks the live candidate (optionally restricted by `eligible`) with the
// largest residual norm; returns -1 if none.
template <typename Pred>
int pick_largest(const std::vector<Candidate>& cands, Pred eligible) {
  int best = -1;
  double best_norm = -1.0;
  for (std::size_t i = 0; i < cands.size(); ++i) {
    if (cands[i].consumed || !eligible(cands[i])) continue;
    const double n = cands[i].left.norm();
    if (n > best_norm) {
      best_norm = n;
      best = static_cast<int>(i);
    }
  }
  return best;
}

// Accepts candidate `idx`: re-orthogonalizes, normalizes, and appends it to `basis`.
void accept(Candidate& c, PairedBasis& basis, ComplexVector& out_left, ComplexVector& out_right) {
  ComplexVector left = c.left;
  ComplexVector right = c.right;
  basis.project_out(left, right.size() > 0 ? &right : nullptr);
  const double n = left.norm();
  left /= n;
  if (right.size() > 0) right /= n;
  basis.add(left, right);
  c.consumed = true;
  out_left = std::move(left);
  out_right = std::move(right);
}

// Completes `basis` with `count` more unit vectors drawn from `seeds` and
// then the standard basis, always taking the largest residual.
std::vector<ComplexVector> complete_basis(PairedBasis& basis, const std::vector<ComplexVector>& seeds,
                                          Index dim, Index count) {
  std::vector<Candidate> cands;
  cands.reserve(seeds.size() + static_cast<std::size_t>(dim));
  for (const auto& s : seeds) cands.push_back({s, ComplexVector(), 0.0, false});
  for (Index i = 0; i < dim; ++i) {
    cands.push_back({ComplexVector::Unit(dim, i), ComplexVector(), 0.0, false});
  }
  for (auto& c : cands) basis.project_out(c.left, nullptr);

  std::vector<ComplexVector> out;
  for (Index n = 0; n < count; ++n) {
    const int best = pick_largest(cands, [](const Candidate&) { return true; });
    ComplexVector left;
    ComplexVector unused;
    accept(cands[static_cast<std::size_t>(best)], basis, left, unused);
    update_candidates(cands, basis);
    out.push_back(std::move(left));
  }
  return out;
}

// Quaternion column whose equivalent complex first column is [c1; c2]:
// Qa = c1, Qb = -conj(c2).
void store_column(QuaternionMatrix& q, Index col, const ComplexVector& c) {
  const Index h = c.size() / 2;
  for (Index r = 0; r < h; ++r) {
    const std::complex<double> a = c(r);
    const std::complex<double> b = -std::conj(c(h + r));
    q.set(r, col, {a.real(), a.imag(), b.real(), b.imag()});
  }
}

}  // namespace

QqrResult qqr(const QuaternionMatrix& a) {
  const Index m = a.rows();
  const Index n = a.cols();
  if (m < 1 || n < 1) throw std::invalid_argument("qqr: empty matrix");
  const Index k = std::min(m, n);

  QuaternionColumns work(a);
  std::vector<Reflector> reflectors(static_cast<std::size_t>(k));
  for (Index j = 0; j < k; ++j) {
    Quaternion* x = work.col(j);
    double norm_x2 = 0.0;
    for (Index i = j; i < m; ++i) norm_x2 += norm2(x[i]);
    const double norm_x = std::sqrt(norm_x2);
    Reflector& h = reflectors[static_cast<std::size_t>(j)];
    h.offset = j;
    if (norm_x == 0.0) continue;

    const double head_mod = modulus(x[j]);
    const Quaternion phase = head_mod > 0.0 ? x[j] / head_mod : Quaternion(1.0);
    // H x = alpha e_1 with alpha = -phase * ||x||.
    const Quaternion alpha = -phase * norm_x;
    h.v.assign(x + j, x + m);
    h.v[0] -= alpha;
    h.vnorm2 = 2.0 * norm_x * (norm_x + head_mod);
    if (h.vnorm2 == 0.0) continue;

    for (Index c = j + 1; c < n; ++c) apply_reflector(h, work.col(c));
    x[j] = alpha;
    for (Index i = j + 1; i < m; ++i) x[i] = Quaternion();
  }

  // Accumulate the thin Q = H_0 ... H_{k-1} eye(m, k).
  QuaternionColumns qcols(m, k);
  for (Index c = 0; c < k; ++c) qcols.at(c, c) = Quaternion(1.0);
  for (Index j = k - 1; j >= 0; --j) {
    for (Index c = j; c < k; ++c) apply_reflector(reflectors[static_cast<std::size_t>(j)], qcols.col(c));
  }

  // Move pivot phases into Q: Q(:, j) <- Q(:, j) u_j, R(j, :) <- conj(u_j) R(j, :).
  for (Index j = 0; j < k; ++j) {
    const Quaternion pivot = work.at(j, j);
    const double mod = modulus(pivot);
    if (mod == 0.0) continue;
    const Quaternion u = pivot / mod;
    const Quaternion u_conj = conj(u);
    for (Index i = 0; i < m; ++i) qcols.at(i, j) = qcols.at(i, j) * u;
    for (Index c = j; c < n; ++c) work.at(j, c) = u_conj * work.at(j, c);
    work.at(j, j) = Quaternion(mod);
  }

  return {qcols.to_matrix(m, k), work.to_matrix(k, n)};
}

RealVector equivalent_complex_singular_values(const QuaternionMatrix& a) {
  if (a.size() == 0) return RealVector();
  Eigen::BDCSVD<ComplexMatrix> svd(to_equivalent_complex(a));
  return svd.singularValues();
}

RealVector singular_values(const QuaternionMatrix& a) {
  const RealVector all = equivalent_complex_singular_values(a);
  const Index k = all.size() / 2;
  RealVector out(k);
  for (Index s = 0; s < k; ++s) out(s) = all(2 * s);
  return out;
}

double nuclear_norm(const QuaternionMatrix& a) { return singular_values(a).sum(); }

QsvdResult qsvd(const QuaternionMatrix& a) {
  const Index m = a.rows();
  const Index n = a.cols();
  const Index k = std::min(m, n);
  QsvdResult out{QuaternionMatrix(m, k), RealVector::Zero(k), QuaternionMatrix(n, k)};
  if (k == 0) return out;

  Eigen::BDCSVD<ComplexMatrix> svd(to_equivalent_complex(a),
                                   Eigen::ComputeThinU | Eigen::ComputeThinV);
  const RealVector& s = svd.singularValues();
  const ComplexMatrix& w = svd.matrixU();
  const ComplexMatrix& z = svd.matrixV();
  const Index total = s.size();  // 2k
  const double s_max = total > 0 ? s(0) : 0.0;
  const double eps = std::numeric_limits<double>::epsilon();
  const double zero_tol = static_cast<double>(2 * std::max(m, n)) * eps * s_max;
  const double cluster_tol = 1e-9 * s_max;

  std::vector<Candidate> cands;
  cands.reserve(static_cast<std::size_t>(total));
  for (Index p = 0; p < total; ++p) cands.push_back({w.col(p), z.col(p), s(p), false});

  // Nonzero singular values: within each cluster of (numerically) equal
  // values, pick J-orthogonal left vectors and carry the same linear
  // combination over to the right vectors.
  PairedBasis left_basis;
  std::vector<ComplexVector> lefts;
  std::vector<ComplexVector> rights;
  std::vector<double> sigmas;
  while (static_cast<Index>(lefts.size()) < k) {
    const auto head = std::find_if(cands.begin(), cands.end(),
                                   [](const Candidate& c) { return !c.consumed; });
    if (head == cands.end() || head->sigma <= zero_tol) break;
    const double floor = head->sigma - cluster_tol;
    const int best = pick_largest(cands, [&](const Candidate& c) { return c.sigma >= floor; });
    Candidate& chosen = cands[static_cast<std::size_t>(best)];
    if (chosen.left.norm() < 1e-3) {
      // Cluster exhausted: its remaining members lie in the span already taken.
      for (auto& c : cands) {
        if (!c.consumed && c.sigma >= floor) c.consumed = true;
      }
      continue;
    }
    ComplexVector left;
    ComplexVector right;
    const double sigma = chosen.sigma;
    accept(chosen, left_basis, left, right);
    update_candidates(cands, left_basis);
    lefts.push_back(std::move(left));
    rights.push_back(std::move(right));
    sigmas.push_back(sigma);
  }

  const Index nonzero = static_cast<Index>(lefts.size());
  // Order is nonincreasing up to cluster_tol; make it exact.
  std::vector<Index> order(static_cast<std::size_t>(nonzero));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Index x, Index y) {
    return sigmas[static_cast<std::size_t>(x)] > sigmas[static_cast<std::size_t>(y)];
  });
  for (Index c = 0; c < nonzero; ++c) {
    const auto src = static_cast<std::size_t>(order[static_cast<std::size_t>(c)]);
    out.sigma(c) = sigmas[src];
    store_column(out.u, c, lefts[src]);
    store_column(out.v, c, rights[src]);
  }

  if (nonzero < k) {
    // Null space: complete U and V independently.
    PairedBasis right_basis;
    for (const auto& r : rights) right_basis.add(r.normalized(), ComplexVector());
    std::vector<ComplexVector> left_seeds;
    std::vector<ComplexVector> right_seeds;
    for (Index p = 0; p < total; ++p) {
      if (s(p) <= zero_tol) {
        left_seeds.push_back(w.col(p));
        right_seeds.push_back(z.col(p));
      }
    }
    const auto extra_left = complete_basis(left_basis, left_seeds, 2 * m, k - nonzero);
    const auto extra_right = complete_basis(right_basis, right_seeds, 2 * n, k - nonzero);
    for (Index c = nonzero; c < k; ++c) {
      store_column(out.u, c, extra_left[static_cast<std::size_t>(c - nonzero)]);
      store_column(out.v, c, extra_right[static_cast<std::size_t>(c - nonzero)]);
    }
  }
  return out;
}

TriFactor TriFactor::identity(Index rows, Index cols, Index rank) {
  return {QuaternionMatrix::identity(rows, rank), QuaternionMatrix::identity(rank, rank),
          QuaternionMatrix::identity(rank, cols), rank};
}

RealVector TriFactor::diagonal_moduli() const {
  RealVector out(d.rows());
  for (Index s = 0; s < d.rows(); ++s) out(s) = modulus(d(s, s));
  return out;
}

QuaternionMatrix TriFactor::product() const { return matmul(matmul(l, d), rfac); }

TriFactor cqsvd_qqr_step(const QuaternionMatrix& x, const TriFactor& tf) {
  const Index r = tf.target_rank;
  if (tf.l.rows() != x.rows() || tf.l.cols() != r || tf.rfac.rows() != r ||
      tf.rfac.cols() != x.cols() || tf.d.rows() != r || tf.d.cols() != r) {
    throw std::invalid_argument("cqsvd_qqr_step: tri-factor does not match a " +
                                std::to_string(x.rows()) + "x" + std::to_string(x.cols()) +
                                " matrix at rank " + std::to_string(r));
  }
  TriFactor next;
  next.target_rank = r;
  next.l = qqr(times_adjoint(x, tf.rfac)).q;
  QqrResult right = qqr(adjoint_times(x, next.l));
  next.rfac = conj_transpose(right.q);
  // r^H of the second factorization equals l^H x rfac^H.
  next.d = conj_transpose(right.r);
  return next;
}

TriFactor cqsvd_qqr(const QuaternionMatrix& x, Index rank, int max_iter, double tol) {
  if (rank < 1 || rank > std::min(x.rows(), x.cols())) {
    throw std::invalid_argument("cqsvd_qqr: rank " + std::to_string(rank) +
                                " outside [1, min(M, N)]");
  }
  TriFactor tf = TriFactor::identity(x.rows(), x.cols(), rank);
  RealVector prev = tf.diagonal_moduli();
  for (int it = 0; it < max_iter; ++it) {
    tf = cqsvd_qqr_step(x, tf);
    const RealVector cur = tf.diagonal_moduli();
    const double scale = std::max(cur.maxCoeff(), std::numeric_limits<double>::min());
    const double change = (cur - prev).cwiseAbs().maxCoeff();
    prev = cur;
    if (change <= tol * scale) break;
  }
  return tf;
}

}  // namespace qmc
