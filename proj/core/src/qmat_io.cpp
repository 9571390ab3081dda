#include "qmc/qmat_io.hpp"

#include <fstream>
#include <limits>

#include "qmc/detail/byte_io.hpp"
#include "qmc/errors.hpp"

namespace qmc {

void write_qmat(std::ostream& out, const QuaternionMatrix& q) {
  constexpr auto kMax = std::numeric_limits<std::uint32_t>::max();
  if (static_cast<std::uint64_t>(q.rows()) > kMax || static_cast<std::uint64_t>(q.cols()) > kMax) {
    throw std::invalid_argument("write_qmat: matrix too large for a u32 header");
  }
  out.write("QMAT", 4);
  out.put(static_cast<char>(kQmatVersion));
  detail::put_u32(out, static_cast<std::uint32_t>(q.rows()));
  detail::put_u32(out, static_cast<std::uint32_t>(q.cols()));
  for (Index r = 0; r < q.rows(); ++r) {
    for (Index c = 0; c < q.cols(); ++c) {
      for (int p = 0; p < 4; ++p) detail::put_f64(out, q.plane(p)(r, c));
    }
  }
  if (!out) throw IoError("write_qmat: stream write failed");
}

void write_qmat(const std::filesystem::path& path, const QuaternionMatrix& q) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  write_qmat(out, q);
}

QuaternionMatrix read_qmat(std::istream& in) {
  constexpr const char* kWhat = "QMAT";
  detail::expect_header(in, "QMAT", kQmatVersion, kWhat);
  const auto rows = static_cast<Index>(detail::get_u32(in, kWhat));
  const auto cols = static_cast<Index>(detail::get_u32(in, kWhat));
  QuaternionMatrix q(rows, cols);
  for (Index r = 0; r < rows; ++r) {
    for (Index c = 0; c < cols; ++c) {
      for (int p = 0; p < 4; ++p) q.plane(p)(r, c) = detail::get_f64(in, kWhat);
    }
  }
  return q;
}

QuaternionMatrix read_qmat(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return read_qmat(in);
}

}  // namespace qmc
