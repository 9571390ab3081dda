#include "qmc/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace qmc {

QuaternionMatrix random_gaussian(Index rows, Index cols, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  QuaternionMatrix out(rows, cols);
  for (Index r = 0; r < rows; ++r) {
    for (Index c = 0; c < cols; ++c) {
      const double w = normal(rng);
      const double x = normal(rng);
      const double y = normal(rng);
      const double z = normal(rng);
      out.set(r, c, {w, x, y, z});
    }
  }
  return out;
}

QuaternionMatrix random_gaussian(Index rows, Index cols, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  return random_gaussian(rows, cols, rng);
}

QuaternionMatrix random_low_rank(Index rows, Index cols, Index rank, std::uint64_t seed,
                                 double scale) {
  if (rank < 1 || rank > std::min(rows, cols)) {
    throw std::invalid_argument("random_low_rank: rank must lie in [1, min(rows, cols)]");
  }
  std::mt19937_64 rng(seed);
  const QuaternionMatrix left = random_gaussian(rows, rank, rng);
  const QuaternionMatrix right = random_gaussian(rank, cols, rng);
  return matmul(left, right) * scale;
}

SparseSpectrumInstance qdct_sparse_low_rank(const QdctContext& ctx, Index band, double density,
                                            std::uint64_t seed, double scale) {
  const Index rows = ctx.rows();
  const Index cols = ctx.cols();
  if (band < 1 || band > rows) throw std::invalid_argument("qdct_sparse_low_rank: bad band");
  const auto nonzeros = static_cast<Index>(std::llround(density * static_cast<double>(rows * cols)));
  if (density < 0.0 || nonzeros > band * cols) {
    throw std::invalid_argument("qdct_sparse_low_rank: density does not fit in the band");
  }
  std::mt19937_64 rng(seed);
  std::vector<Index> slots(static_cast<std::size_t>(band * cols));
  std::iota(slots.begin(), slots.end(), Index{0});
  std::shuffle(slots.begin(), slots.end(), rng);
  std::normal_distribution<double> normal(0.0, scale);
  QuaternionMatrix coeffs(rows, cols);
  for (Index t = 0; t < nonzeros; ++t) {
    const Index slot = slots[static_cast<std::size_t>(t)];
    const double w = normal(rng);
    const double x = normal(rng);
    const double y = normal(rng);
    const double z = normal(rng);
    coeffs.set(slot / cols, slot % cols, {w, x, y, z});
  }
  return {iqdct_l(ctx, coeffs), std::move(coeffs)};
}

}  // namespace qmc
