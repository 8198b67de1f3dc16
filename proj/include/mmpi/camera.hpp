#pragma once

#include <span>
#include <vector>

#include "mmpi/types.hpp"

namespace mmpi {

/// Pinhole camera. Convention: +x right, +y up, -z forward; pixel (0,0) is
/// the bottom-left of the image and rays pass through pixel centers.
struct Camera {
  int width = 0;
  int height = 0;
  Real fx = 0, fy = 0, cx = 0, cy = 0;
  Mat4 cam_to_world = Mat4::Identity();

  Vec3 position() const { return cam_to_world.topRightCorner<3, 1>(); }
  Mat3 rotation() const { return cam_to_world.topLeftCorner<3, 3>(); }
  Vec3 forward() const { return -rotation().col(2); }

  Real tan_half_fov_x() const { return 0.5 * width / fx; }
  Real tan_half_fov_y() const { return 0.5 * height / fy; }

  int64_t pixel_count() const { return int64_t(width) * height; }

  /// Throws InputError on non-positive focal lengths, degenerate dims, or a
  /// pose whose rotation block violates R^T R = I beyond `pose_tol`.
  void validate(Real pose_tol = 1e-9) const;
};

struct Ray {
  Vec3 origin{0, 0, 0};
  Vec3 dir{0, 0, -1};  // unit length
  int64_t pixel_id = -1;
};

/// Ray through the center of pixel (ix, iy), iy counted bottom-up.
Ray make_ray(const Camera& cam, int ix, int iy);

/// One ray per pixel index (iy * width + ix). Out-of-bounds -> InputError.
std::vector<Ray> generate_rays(const Camera& cam, std::span<const int64_t> pixels);

/// All pixels, row-major bottom-up.
std::vector<Ray> generate_all_rays(const Camera& cam);

}  // namespace mmpi
