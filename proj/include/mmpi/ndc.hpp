#pragma once

#include "mmpi/camera.hpp"
#include "mmpi/types.hpp"

namespace mmpi {

/// Reference frustum of one MPI. Its NDC cube maps the frustum from the near
/// plane to infinity onto [-1,1]^3: a_z = 1 + 2n/z in the local frame
/// (z < 0 in front), so z = -n gives a_z = -1 and z -> -inf gives a_z -> 1.
struct MpiFrustum {
  Mat4 pose = Mat4::Identity();  // frustum-to-world, camera convention
  Real tan_x = 1.0;
  Real tan_y = 1.0;
  Real near = 1.0;

  Mat4 world_to_local = Mat4::Identity();

  static MpiFrustum make(const Mat4& pose, Real tan_x, Real tan_y, Real near);
  void validate() const;

  Vec3 to_local(const Vec3& world) const {
    return world_to_local.topLeftCorner<3, 3>() * world + world_to_local.topRightCorner<3, 1>();
  }
  Vec3 dir_to_local(const Vec3& dir) const { return world_to_local.topLeftCorner<3, 3>() * dir; }
  Vec3 to_world(const Vec3& local) const {
    return pose.topLeftCorner<3, 3>() * local + pose.topRightCorner<3, 1>();
  }
};

/// World point -> NDC. Requires local z < 0; throws InputError otherwise.
Vec3 ndc_project(const MpiFrustum& f, const Vec3& world);

/// NDC -> world point. Requires a_z < 1; throws InputError at/beyond the
/// point at infinity.
Vec3 ndc_unproject(const MpiFrustum& f, const Vec3& ndc);

/// NDC image of a world ray. When the ray is forward-facing the image is the
/// line origin + t' * dir with t' in [0,1): t'=0 at the near plane, t'->1 at
/// infinity, and dir oriented along the direction of travel (dir.z > 0 iff
/// forward-facing). `t_shift` is the world-space parameter of the near-plane
/// crossing (the line's t'=0 point), so world t = t_shift at t'=0.
struct NdcRay {
  Vec3 origin{0, 0, 0};
  Vec3 dir{0, 0, 0};
  bool facing = false;
  bool valid = false;  // false: no usable NDC image (parallel/degenerate)
  Real t_shift = 0;    // world-ray parameter of the shifted origin
  Real local_dz = 0;   // ray direction z in the frustum frame
};

NdcRay ndc_project_ray(const MpiFrustum& f, const Ray& ray);

/// Clamped cross-projection used by reliability lookups: always returns a
/// point inside [-1,1]^3. Points at/behind the camera plane are pushed to the
/// limiting border location instead of failing.
Vec3 ndc_project_clamped(const MpiFrustum& f, const Vec3& world);

/// Same, for a point at infinity in world direction `dir`.
Vec3 ndc_project_dir_clamped(const MpiFrustum& f, const Vec3& dir);

}  // namespace mmpi
