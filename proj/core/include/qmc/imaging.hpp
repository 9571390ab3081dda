#pragma once

#include <filesystem>
#include <limits>

#include "qmc/mask.hpp"
#include "qmc/quaternion_matrix.hpp"

namespace qmc {

/// RGB image with channel values on the [0, 255] scale. Plane shapes are
/// height x width.
struct ColorImage {
  RealPlane r;
  RealPlane g;
  RealPlane b;

  ColorImage() = default;
  /// Black image.
  ColorImage(Index width, Index height);
  /// Throws std::invalid_argument if the channel shapes differ.
  ColorImage(RealPlane red, RealPlane green, RealPlane blue);

  Index width() const { return r.cols(); }
  Index height() const { return r.rows(); }
  const RealPlane& channel(int c) const { return c == 0 ? r : (c == 1 ? g : b); }
  RealPlane& channel(int c) { return c == 0 ? r : (c == 1 ? g : b); }

  friend bool operator==(const ColorImage& a, const ColorImage& b) {
    return a.r == b.r && a.g == b.g && a.b == b.b;
  }
};

/// 0 + R i + G j + B k.
QuaternionMatrix image_to_quaternion(const ColorImage& img);
/// Takes the imaginary parts, clamped to [0, 255]; the real part is dropped.
ColorImage quaternion_to_image(const QuaternionMatrix& q);

/// Reads an 8-bit RGB PNG (palette and grayscale inputs are expanded to RGB).
/// Throws FormatError for images with an alpha channel or 16-bit depth and
/// IoError when the file cannot be opened.
ColorImage read_png(const std::filesystem::path& path);
/// Writes 8-bit RGB, rounding each value after clamping to [0, 255].
void write_png(const std::filesystem::path& path, const ColorImage& img);

/// Single-channel PNG, 255 = observed and 0 = missing. Reading treats any
/// nonzero gray level as observed.
void write_mask_png(const std::filesystem::path& path, const Mask& mask);
Mask read_mask_png(const std::filesystem::path& path);

inline constexpr double kInfinitePsnr = std::numeric_limits<double>::infinity();

/// 10 log10(255^2 / MSE) over all pixels and channels; identical images give
/// kInfinitePsnr. Throws std::invalid_argument on a size mismatch.
double psnr(const ColorImage& ref, const ColorImage& test);

/// Mean SSIM with an 11 x 11 Gaussian window (sigma 1.5), K1 = 0.01,
/// K2 = 0.03, L = 255, over valid window positions, averaged over channels.
/// Throws std::invalid_argument on a size mismatch or a side shorter than 11.
double ssim(const ColorImage& ref, const ColorImage& test);

struct QualityReport {
  double psnr_db = 0.0;
  double ssim = 0.0;
};
QualityReport quality(const ColorImage& ref, const ColorImage& test);

}  // namespace qmc
