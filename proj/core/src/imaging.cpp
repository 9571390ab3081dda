#include "qmc/imaging.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <csetjmp>
#include <cstdio>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "qmc/errors.hpp"

namespace qmc {
namespace {

struct FileCloser {
  void operator()(std::FILE* f) const { std::fclose(f); }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

FilePtr open_file(const std::filesystem::path& path, const char* mode) {
  FilePtr f(std::fopen(path.c_str(), mode));
  if (!f) throw IoError("cannot open " + path.string());
  return f;
}

[[noreturn]] void png_error_fn(png_structp png, png_const_charp msg) {
  auto* text = static_cast<std::string*>(png_get_error_ptr(png));
  if (text) *text = msg;
  png_longjmp(png, 1);
}

void png_warning_fn(png_structp, png_const_charp) {}

std::uint8_t to_byte(double v) {
  return static_cast<std::uint8_t>(std::lround(std::clamp(v, 0.0, 255.0)));
}

// Decoded 8-bit pixels, `channels` interleaved values per pixel.
struct RawImage {
  png_uint_32 width = 0;
  png_uint_32 height = 0;
  int channels = 0;
  std::vector<std::uint8_t> data;
};

// Gray and palette inputs expand to `want_rgb ? 3 : 1` channels.
RawImage read_raw(const std::filesystem::path& path, bool want_rgb) {
  FilePtr file = open_file(path, "rb");
  png_byte sig[8];
  if (std::fread(sig, 1, 8, file.get()) != 8 || png_sig_cmp(sig, 0, 8) != 0) {
    throw FormatError(path.string() + " is not a PNG file");
  }
  std::string error;
  png_structp png =
      png_create_read_struct(PNG_LIBPNG_VER_STRING, &error, png_error_fn, png_warning_fn);
  if (!png) throw IoError("png_create_read_struct failed");
  png_infop info = png_create_info_struct(png);
  RawImage raw;
  std::vector<png_bytep> rows;
  // Objects with nontrivial destructors above stay alive across the longjmp.
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw FormatError(path.string() + ": " + error);
  }
  png_init_io(png, file.get());
  png_set_sig_bytes(png, 8);
  png_read_info(png, info);

  const png_byte color = png_get_color_type(png, info);
  const png_byte depth = png_get_bit_depth(png, info);
  std::string reject;
  if ((color & PNG_COLOR_MASK_ALPHA) != 0 || png_get_valid(png, info, PNG_INFO_tRNS) != 0) {
    reject = "images with an alpha channel are not supported";
  } else if (depth == 16) {
    reject = "16-bit images are not supported";
  }
  if (!reject.empty()) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw FormatError(path.string() + ": " + reject);
  }
  if (color == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
  if (color == PNG_COLOR_TYPE_GRAY && depth < 8) png_set_expand_gray_1_2_4_to_8(png);
  const bool is_gray = color == PNG_COLOR_TYPE_GRAY;
  if (is_gray && want_rgb) png_set_gray_to_rgb(png);
  if (!is_gray && !want_rgb) png_set_rgb_to_gray_fixed(png, 1, -1, -1);
  png_read_update_info(png, info);

  raw.width = png_get_image_width(png, info);
  raw.height = png_get_image_height(png, info);
  raw.channels = png_get_channels(png, info);
  const std::size_t stride = png_get_rowbytes(png, info);
  raw.data.resize(stride * raw.height);
  rows.resize(raw.height);
  for (png_uint_32 y = 0; y < raw.height; ++y) rows[y] = raw.data.data() + y * stride;
  png_read_image(png, rows.data());
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);
  return raw;
}

void write_raw(const std::filesystem::path& path, png_uint_32 width, png_uint_32 height,
               int color_type, int channels, const std::vector<std::uint8_t>& data) {
  FilePtr file = open_file(path, "wb");
  std::string error;
  png_structp png =
      png_create_write_struct(PNG_LIBPNG_VER_STRING, &error, png_error_fn, png_warning_fn);
  if (!png) throw IoError("png_create_write_struct failed");
  png_infop info = png_create_info_struct(png);
  std::vector<png_bytep> rows(height);
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw IoError(path.string() + ": " + error);
  }
  png_init_io(png, file.get());
  png_set_IHDR(png, info, width, height, 8, color_type, PNG_INTERLACE_NONE,
               PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  const std::size_t stride = static_cast<std::size_t>(width) * static_cast<std::size_t>(channels);
  for (png_uint_32 y = 0; y < height; ++y) {
    rows[y] = const_cast<png_bytep>(data.data() + y * stride);
  }
  png_write_image(png, rows.data());
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
  if (std::fflush(file.get()) != 0) throw IoError("failed to write " + path.string());
}

void require_same_size(const ColorImage& a, const ColorImage& b, const char* op) {
  if (a.width() != b.width() || a.height() != b.height()) {
    throw std::invalid_argument(std::string(op) + ": images differ in size");
  }
}

// Normalized 1-D Gaussian taps; the 2-D window is their outer product.
Eigen::VectorXd gaussian_taps(int size, double sigma) {
  Eigen::VectorXd taps(size);
  const double center = (size - 1) / 2.0;
  for (int t = 0; t < size; ++t) {
    const double d = t - center;
    taps(t) = std::exp(-d * d / (2.0 * sigma * sigma));
  }
  return taps / taps.sum();
}

// Valid-mode separable filtering with the window.
RealPlane filter_valid(const RealPlane& a, const Eigen::VectorXd& taps) {
  const Index k = taps.size();
  const Index out_rows = a.rows() - k + 1;
  const Index out_cols = a.cols() - k + 1;
  RealPlane horizontal = RealPlane::Zero(a.rows(), out_cols);
  for (Index t = 0; t < k; ++t) horizontal += taps(t) * a.middleCols(t, out_cols);
  RealPlane out = RealPlane::Zero(out_rows, out_cols);
  for (Index t = 0; t < k; ++t) out += taps(t) * horizontal.middleRows(t, out_rows);
  return out;
}

double ssim_channel(const RealPlane& x, const RealPlane& y, const Eigen::VectorXd& taps) {
  constexpr double kRange = 255.0;
  constexpr double c1 = (0.01 * kRange) * (0.01 * kRange);
  constexpr double c2 = (0.03 * kRange) * (0.03 * kRange);
  const RealPlane mx = filter_valid(x, taps);
  const RealPlane my = filter_valid(y, taps);
  const RealPlane sxx = filter_valid(x.cwiseProduct(x), taps) - mx.cwiseProduct(mx);
  const RealPlane syy = filter_valid(y.cwiseProduct(y), taps) - my.cwiseProduct(my);
  const RealPlane sxy = filter_valid(x.cwiseProduct(y), taps) - mx.cwiseProduct(my);
  const auto num = (2.0 * mx.array() * my.array() + c1) * (2.0 * sxy.array() + c2);
  const auto den = (mx.array().square() + my.array().square() + c1) *
                   (sxx.array() + syy.array() + c2);
  return (num / den).mean();
}

}  // namespace

ColorImage::ColorImage(Index width, Index height)
    : r(RealPlane::Zero(height, width)),
      g(RealPlane::Zero(height, width)),
      b(RealPlane::Zero(height, width)) {}

ColorImage::ColorImage(RealPlane red, RealPlane green, RealPlane blue)
    : r(std::move(red)), g(std::move(green)), b(std::move(blue)) {
  if (g.rows() != r.rows() || g.cols() != r.cols() || b.rows() != r.rows() ||
      b.cols() != r.cols()) {
    throw std::invalid_argument("ColorImage: channel shapes differ");
  }
}

QuaternionMatrix image_to_quaternion(const ColorImage& img) {
  return QuaternionMatrix::pure(img.r, img.g, img.b);
}

ColorImage quaternion_to_image(const QuaternionMatrix& q) {
  auto clamp = [](const RealPlane& p) -> RealPlane { return p.cwiseMax(0.0).cwiseMin(255.0); };
  return {clamp(q.x()), clamp(q.y()), clamp(q.z())};
}

ColorImage read_png(const std::filesystem::path& path) {
  const RawImage raw = read_raw(path, true);
  ColorImage img(raw.width, raw.height);
  for (Index y = 0; y < img.height(); ++y) {
    for (Index x = 0; x < img.width(); ++x) {
      const std::size_t base = static_cast<std::size_t>((y * img.width() + x) * 3);
      img.r(y, x) = raw.data[base];
      img.g(y, x) = raw.data[base + 1];
      img.b(y, x) = raw.data[base + 2];
    }
  }
  return img;
}

void write_png(const std::filesystem::path& path, const ColorImage& img) {
  std::vector<std::uint8_t> data(static_cast<std::size_t>(img.width() * img.height() * 3));
  for (Index y = 0; y < img.height(); ++y) {
    for (Index x = 0; x < img.width(); ++x) {
      const std::size_t base = static_cast<std::size_t>((y * img.width() + x) * 3);
      data[base] = to_byte(img.r(y, x));
      data[base + 1] = to_byte(img.g(y, x));
      data[base + 2] = to_byte(img.b(y, x));
    }
  }
  write_raw(path, static_cast<png_uint_32>(img.width()), static_cast<png_uint_32>(img.height()),
            PNG_COLOR_TYPE_RGB, 3, data);
}

void write_mask_png(const std::filesystem::path& path, const Mask& mask) {
  std::vector<std::uint8_t> data(mask.flags().size());
  std::transform(mask.flags().begin(), mask.flags().end(), data.begin(),
                 [](std::uint8_t f) { return f ? std::uint8_t{255} : std::uint8_t{0}; });
  write_raw(path, static_cast<png_uint_32>(mask.cols()), static_cast<png_uint_32>(mask.rows()),
            PNG_COLOR_TYPE_GRAY, 1, data);
}

Mask read_mask_png(const std::filesystem::path& path) {
  const RawImage raw = read_raw(path, false);
  std::vector<std::uint8_t> flags(raw.data.size());
  std::transform(raw.data.begin(), raw.data.end(), flags.begin(),
                 [](std::uint8_t v) { return v != 0 ? std::uint8_t{1} : std::uint8_t{0}; });
  return Mask(raw.height, raw.width, std::move(flags));
}

double psnr(const ColorImage& ref, const ColorImage& test) {
  require_same_size(ref, test, "psnr");
  double sse = 0.0;
  for (int c = 0; c < 3; ++c) sse += (ref.channel(c) - test.channel(c)).squaredNorm();
  if (sse == 0.0) return kInfinitePsnr;
  const double mse = sse / static_cast<double>(3 * ref.width() * ref.height());
  return 10.0 * std::log10(255.0 * 255.0 / mse);
}

double ssim(const ColorImage& ref, const ColorImage& test) {
  constexpr int kWindow = 11;
  require_same_size(ref, test, "ssim");
  if (ref.width() < kWindow || ref.height() < kWindow) {
    throw std::invalid_argument("ssim: images must be at least 11 x 11");
  }
  const Eigen::VectorXd taps = gaussian_taps(kWindow, 1.5);
  double sum = 0.0;
  for (int c = 0; c < 3; ++c) sum += ssim_channel(ref.channel(c), test.channel(c), taps);
  return sum / 3.0;
}

QualityReport quality(const ColorImage& ref, const ColorImage& test) {
  return {psnr(ref, test), ssim(ref, test)};
}

}  // namespace qmc
