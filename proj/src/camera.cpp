#include "mmpi/camera.hpp"

namespace mmpi {

void Camera::validate(Real pose_tol) const {
  if (width < 1 || height < 1) throw InputError("camera: image dims must be >= 1");
  if (!(fx > 0) || !(fy > 0)) throw InputError("camera: focal lengths must be positive");
  if (!is_rigid(cam_to_world, pose_tol)) {
    throw InputError("camera: cam_to_world is not a rigid transform");
  }
}

Ray make_ray(const Camera& cam, int ix, int iy) {
  if (ix < 0 || ix >= cam.width || iy < 0 || iy >= cam.height) {
    throw InputError("make_ray: pixel (" + std::to_string(ix) + "," + std::to_string(iy) +
                     ") out of bounds");
  }
  const Real u = ix + 0.5;
  const Real v = iy + 0.5;
  const Vec3 dir_cam((u - cam.cx) / cam.fx, (v - cam.cy) / cam.fy, -1.0);
  Ray r;
  r.origin = cam.position();
  r.dir = (cam.rotation() * dir_cam).normalized();
  r.pixel_id = int64_t(iy) * cam.width + ix;
  return r;
}

std::vector<Ray> generate_rays(const Camera& cam, std::span<const int64_t> pixels) {
  std::vector<Ray> rays;
  rays.reserve(pixels.size());
  for (int64_t p : pixels) {
    if (p < 0 || p >= cam.pixel_count()) {
      throw InputError("generate_rays: pixel index " + std::to_string(p) + " out of bounds");
    }
    rays.push_back(make_ray(cam, static_cast<int>(p % cam.width), static_cast<int>(p / cam.width)));
  }
  return rays;
}

std::vector<Ray> generate_all_rays(const Camera& cam) {
  std::vector<Ray> rays;
  rays.reserve(static_cast<size_t>(cam.pixel_count()));
  for (int iy = 0; iy < cam.height; ++iy) {
    for (int ix = 0; ix < cam.width; ++ix) {
      rays.push_back(make_ray(cam, ix, iy));
    }
  }
  return rays;
}

}  // namespace mmpi
