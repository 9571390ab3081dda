#pragma once

#include <cstdint>
#include <random>

#include "qmc/qdct.hpp"
#include "qmc/quaternion_matrix.hpp"

namespace qmc {

/// Entries with all four components drawn i.i.d. from N(0, 1).
QuaternionMatrix random_gaussian(Index rows, Index cols, std::mt19937_64& rng);
QuaternionMatrix random_gaussian(Index rows, Index cols, std::uint64_t seed);

/// Product of seeded Gaussian rows x rank and rank x cols factors, times `scale`.
QuaternionMatrix random_low_rank(Index rows, Index cols, Index rank, std::uint64_t seed,
                                 double scale = 1.0);

/// Matrix whose left-handed QDCT is supported on the first `band` rows of
/// coefficients, with a `density` fraction of all rows * cols coefficients
/// nonzero (Gaussian times `scale`). The result has quaternion rank <= band.
struct SparseSpectrumInstance {
  QuaternionMatrix matrix;
  QuaternionMatrix coefficients;
};
SparseSpectrumInstance qdct_sparse_low_rank(const QdctContext& ctx, Index band, double density,
                                            std::uint64_t seed, double scale = 1.0);

}  // namespace qmc
