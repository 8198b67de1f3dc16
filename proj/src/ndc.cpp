#include "mmpi/ndc.hpp"

#include <algorithm>

namespace mmpi {

MpiFrustum MpiFrustum::make(const Mat4& pose, Real tan_x, Real tan_y, Real near) {
  MpiFrustum f;
  f.pose = pose;
  f.tan_x = tan_x;
  f.tan_y = tan_y;
  f.near = near;
  f.world_to_local = rigid_inverse(pose);
  f.validate();
  return f;
}

void MpiFrustum::validate() const {
  if (!(near > 0)) throw InputError("frustum: near must be positive");
  if (!(tan_x > 0) || !(tan_y > 0)) throw InputError("frustum: fov tangents must be positive");
  if (!is_rigid(pose, 1e-9)) throw InputError("frustum: pose is not rigid");
}

Vec3 ndc_project(const MpiFrustum& f, const Vec3& world) {
  const Vec3 q = f.to_local(world);
  if (!(q.z() < 0)) {
    throw InputError("ndc_project: point at/behind the frustum camera plane");
  }
  return Vec3(-q.x() / (q.z() * f.tan_x), -q.y() / (q.z() * f.tan_y), 1.0 + 2.0 * f.near / q.z());
}

Vec3 ndc_unproject(const MpiFrustum& f, const Vec3& ndc) {
  if (!(ndc.z() < 1)) {
    throw InputError("ndc_unproject: a_z >= 1 is at/beyond the point at infinity");
  }
  const Real z = 2.0 * f.near / (ndc.z() - 1.0);
  const Vec3 local(-ndc.x() * f.tan_x * z, -ndc.y() * f.tan_y * z, z);
  return f.to_world(local);
}

NdcRay ndc_project_ray(const MpiFrustum& f, const Ray& ray) {
  NdcRay out;
  const Vec3 o = f.to_local(ray.origin);
  const Vec3 d = f.dir_to_local(ray.dir);
  out.local_dz = d.z();

  if (d.z() < 0) {
    // Forward-facing: advance the origin to the near plane (local z = -n),
    // where the whole NDC line t' in [0,1) covers near plane to infinity.
    const Real t_shift = -(f.near + o.z()) / d.z();
    const Vec3 os = o + t_shift * d;  // os.z == -near exactly
    out.origin = Vec3(os.x() / (f.near * f.tan_x), os.y() / (f.near * f.tan_y), -1.0);
    out.dir = Vec3(-(d.x() / d.z() - os.x() / os.z()) / f.tan_x,
                   -(d.y() / d.z() - os.y() / os.z()) / f.tan_y, -2.0 * f.near / os.z());
    out.facing = true;
    out.valid = true;
    out.t_shift = t_shift;
    return out;
  }

  if (d.z() == 0 || o.z() >= 0) {
    // Parallel to the image planes, or receding from behind the camera
    // plane: no usable NDC image.
    out.facing = false;
    out.valid = false;
    return out;
  }

  // Back-facing ray with a visible anchor: return the tangent line at the
  // origin, oriented along the direction of NDC travel (z-component < 0).
  out.origin = ndc_project(f, ray.origin);
  out.dir = Vec3(-(d.x() * o.z() - o.x() * d.z()) / (o.z() * o.z() * f.tan_x),
                 -(d.y() * o.z() - o.y() * d.z()) / (o.z() * o.z() * f.tan_y),
                 -2.0 * f.near * d.z() / (o.z() * o.z()));
  out.facing = false;
  out.valid = true;
  out.t_shift = 0;
  return out;
}

namespace {

Vec3 clamp_cube(Vec3 p) {
  for (int i = 0; i < 3; ++i) p[i] = std::clamp(p[i], Real(-1), Real(1));
  return p;
}

}  // namespace

Vec3 ndc_project_clamped(const MpiFrustum& f, const Vec3& world) {
  Vec3 q = f.to_local(world);
  // Behind-plane points take the limiting border location (logit still
  // participates in the softmax).
  const Real z_floor = -f.near * 1e-9;
  if (q.z() > z_floor) q.z() = z_floor;
  return clamp_cube(
      Vec3(-q.x() / (q.z() * f.tan_x), -q.y() / (q.z() * f.tan_y), 1.0 + 2.0 * f.near / q.z()));
}

Vec3 ndc_project_dir_clamped(const MpiFrustum& f, const Vec3& dir) {
  Vec3 v = f.dir_to_local(dir);
  const Real z_floor = -1e-12;
  if (v.z() > z_floor) v.z() = z_floor;
  // Point at infinity: a_z = 1, x/y from the direction.
  return clamp_cube(Vec3(-v.x() / (v.z() * f.tan_x), -v.y() / (v.z() * f.tan_y), 1.0));
}

}  // namespace mmpi
