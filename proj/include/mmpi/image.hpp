#pragma once

#include <string>
#include <vector>

#include "mmpi/types.hpp"

namespace mmpi {

/// RGB image, values in [0,1], interleaved, row 0 = bottom of the picture
/// (matches the camera's +y-up pixel convention; PNG I/O flips row order).
struct Image {
  int width = 0;
  int height = 0;
  std::vector<Real> data;  // height * width * 3

  Image() = default;
  Image(int w, int h) : width(w), height(h), data(static_cast<size_t>(w) * h * 3, 0.0) {}

  Real* pixel(int ix, int iy) { return data.data() + (size_t(iy) * width + ix) * 3; }
  const Real* pixel(int ix, int iy) const {
    return data.data() + (size_t(iy) * width + ix) * 3;
  }
  Vec3 rgb(int ix, int iy) const {
    const Real* p = pixel(ix, iy);
    return Vec3(p[0], p[1], p[2]);
  }
  void set_rgb(int ix, int iy, const Vec3& c) {
    Real* p = pixel(ix, iy);
    p[0] = c[0];
    p[1] = c[1];
    p[2] = c[2];
  }

  /// Snap every value to the nearest 8-bit level k/255.
  void quantize8();
};

/// 8-bit RGB PNG decode; other formats raise IoError.
Image load_png(const std::string& path);

/// 8-bit RGB PNG encode (values clamped to [0,1] and rounded).
void save_png(const Image& img, const std::string& path);

}  // namespace mmpi
