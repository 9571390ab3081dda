#include "qmc/mask.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <stdexcept>
#include <string>

#include "qmc/detail/byte_io.hpp"

namespace qmc {

Mask::Mask(Index rows, Index cols)
    : rows_(rows), cols_(cols), observed_(static_cast<std::size_t>(rows * cols), 1) {}

Mask::Mask(Index rows, Index cols, std::vector<std::uint8_t> observed)
    : rows_(rows), cols_(cols), observed_(std::move(observed)) {
  if (observed_.size() != static_cast<std::size_t>(rows * cols)) {
    throw std::invalid_argument("Mask: flag count does not match dimensions");
  }
  for (auto& f : observed_) f = f != 0 ? 1 : 0;
}

Index Mask::observed_count() const {
  return static_cast<Index>(std::count(observed_.begin(), observed_.end(), std::uint8_t{1}));
}

void Mask::require_shape(const QuaternionMatrix& x) const {
  if (x.rows() != rows_ || x.cols() != cols_) {
    throw std::invalid_argument("Mask: matrix is " + std::to_string(x.rows()) + "x" +
                                std::to_string(x.cols()) + ", mask is " + std::to_string(rows_) +
                                "x" + std::to_string(cols_));
  }
}

RealPlane Mask::indicator() const {
  RealPlane out(rows_, cols_);
  for (Index r = 0; r < rows_; ++r) {
    for (Index c = 0; c < cols_; ++c) out(r, c) = observed(r, c) ? 1.0 : 0.0;
  }
  return out;
}

QuaternionMatrix Mask::project(const QuaternionMatrix& x) const {
  return merge(x, QuaternionMatrix(rows_, cols_));
}

QuaternionMatrix Mask::project_complement(const QuaternionMatrix& x) const {
  return merge(QuaternionMatrix(rows_, cols_), x);
}

QuaternionMatrix Mask::merge(const QuaternionMatrix& observed_values,
                             const QuaternionMatrix& fill) const {
  require_shape(observed_values);
  require_shape(fill);
  QuaternionMatrix out = fill;
  for (int p = 0; p < 4; ++p) {
    double* dst = out.plane(p).data();
    const double* src = observed_values.plane(p).data();
    for (std::size_t t = 0; t < observed_.size(); ++t) {
      if (observed_[t] != 0) dst[t] = src[t];
    }
  }
  return out;
}

Mask random_mask(Index rows, Index cols, double missing_ratio, std::uint64_t seed) {
  if (!(missing_ratio >= 0.0 && missing_ratio <= 1.0)) {
    throw std::invalid_argument("random_mask: missing ratio must lie in [0, 1]");
  }
  const Index total = rows * cols;
  const auto missing = static_cast<Index>(std::llround(missing_ratio * static_cast<double>(total)));
  std::vector<Index> order(static_cast<std::size_t>(total));
  std::iota(order.begin(), order.end(), Index{0});
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<std::uint8_t> flags(static_cast<std::size_t>(total), 1);
  for (Index t = 0; t < missing; ++t) flags[static_cast<std::size_t>(order[static_cast<std::size_t>(t)])] = 0;
  return {rows, cols, std::move(flags)};
}

void write_qmsk(std::ostream& out, const Mask& mask) {
  out.write("QMSK", 4);
  out.put(static_cast<char>(kQmskVersion));
  detail::put_u32(out, static_cast<std::uint32_t>(mask.rows()));
  detail::put_u32(out, static_cast<std::uint32_t>(mask.cols()));
  const auto& flags = mask.flags();
  std::vector<char> bytes((flags.size() + 7) / 8, 0);
  for (std::size_t t = 0; t < flags.size(); ++t) {
    if (flags[t] != 0) bytes[t / 8] = static_cast<char>(bytes[t / 8] | (1 << (t % 8)));
  }
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("write_qmsk: stream write failed");
}

void write_qmsk(const std::filesystem::path& path, const Mask& mask) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  write_qmsk(out, mask);
}

Mask read_qmsk(std::istream& in) {
  constexpr const char* kWhat = "QMSK";
  detail::expect_header(in, "QMSK", kQmskVersion, kWhat);
  const auto rows = static_cast<Index>(detail::get_u32(in, kWhat));
  const auto cols = static_cast<Index>(detail::get_u32(in, kWhat));
  const auto total = static_cast<std::size_t>(rows * cols);
  std::vector<char> bytes((total + 7) / 8);
  detail::read_exact(in, bytes.data(), bytes.size(), kWhat);
  std::vector<std::uint8_t> flags(total);
  for (std::size_t t = 0; t < total; ++t) {
    flags[t] = (static_cast<unsigned char>(bytes[t / 8]) >> (t % 8)) & 1U;
  }
  return {rows, cols, std::move(flags)};
}

Mask read_qmsk(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return read_qmsk(in);
}

}  // namespace qmc
