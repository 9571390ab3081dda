#pragma once

#include <qmc/quaternion_matrix.hpp>

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace qmc::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitIo = 3;
inline constexpr int kExitConfig = 4;

/// Entry point shared by the executable and the tests. `args` excludes the
/// program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

struct BenchRow {
  Index size = 0;
  double median_iter_ms = 0.0;
};

/// Median wall time of one qlnm-qqr iteration on a size x size rank-`rank`
/// instance with half the entries missing. Runs exactly `iters` iterations.
BenchRow bench_size(Index size, Index rank, int iters, std::uint64_t seed);

}  // namespace qmc::cli
