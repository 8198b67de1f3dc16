#include "mmpi/grids.hpp"

#include <algorithm>
#include <cmath>

namespace mmpi {

GridAxis locate_on_axis(Real x, Real lo, Real hi, int n) {
  GridAxis ax;
  if (n == 1) return ax;  // single node: constant along this axis
  Real u = (x - lo) / (hi - lo) * (n - 1);
  u = std::clamp(u, Real(0), Real(n - 1));
  int i0 = static_cast<int>(std::floor(u));
  i0 = std::min(i0, n - 2);
  ax.i0 = i0;
  ax.i1 = i0 + 1;
  ax.frac = u - i0;
  return ax;
}

PlaneStack PlaneStack::create(ParamStore& store, const std::string& name, int channels, int planes,
                              int res_x, int res_y, LrGroup group) {
  if (planes < 2) throw InputError("plane stack needs at least 2 planes");
  PlaneStack s;
  s.channels = channels;
  s.planes = planes;
  s.res_x = res_x;
  s.res_y = res_y;
  s.plane_z = uniform_plane_depths(planes);
  s.data = &store.create(name, {channels, planes, res_y, res_x}, group);
  return s;
}

std::vector<Real> uniform_plane_depths(int planes) {
  std::vector<Real> z(static_cast<size_t>(planes));
  for (int l = 0; l < planes; ++l) {
    z[static_cast<size_t>(l)] = -1.0 + 2.0 * (Real(l) / Real(planes - 1));
  }
  return z;
}

void PlaneStack::sample(int l, Real x, Real y, Real* out) const {
  const GridAxis ax = locate_on_axis(x, -1.0, 1.0, res_x);
  const GridAxis ay = locate_on_axis(y, -1.0, 1.0, res_y);
  const Real w00 = (1 - ax.frac) * (1 - ay.frac);
  const Real w10 = ax.frac * (1 - ay.frac);
  const Real w01 = (1 - ax.frac) * ay.frac;
  const Real w11 = ax.frac * ay.frac;
  const Real* v = data->values.data();
  for (int c = 0; c < channels; ++c) {
    const int64_t base = index(c, l, 0, 0);
    out[c] = w00 * v[base + int64_t(ay.i0) * res_x + ax.i0] +
             w10 * v[base + int64_t(ay.i0) * res_x + ax.i1] +
             w01 * v[base + int64_t(ay.i1) * res_x + ax.i0] +
             w11 * v[base + int64_t(ay.i1) * res_x + ax.i1];
  }
}

void PlaneStack::sample_backward(int l, Real x, Real y, const Real* upstream,
                                 std::vector<Real>& grad) const {
  const GridAxis ax = locate_on_axis(x, -1.0, 1.0, res_x);
  const GridAxis ay = locate_on_axis(y, -1.0, 1.0, res_y);
  const Real w00 = (1 - ax.frac) * (1 - ay.frac);
  const Real w10 = ax.frac * (1 - ay.frac);
  const Real w01 = (1 - ax.frac) * ay.frac;
  const Real w11 = ax.frac * ay.frac;
  for (int c = 0; c < channels; ++c) {
    const int64_t base = index(c, l, 0, 0);
    const Real g = upstream[c];
    grad[static_cast<size_t>(base + int64_t(ay.i0) * res_x + ax.i0)] += w00 * g;
    grad[static_cast<size_t>(base + int64_t(ay.i0) * res_x + ax.i1)] += w10 * g;
    grad[static_cast<size_t>(base + int64_t(ay.i1) * res_x + ax.i0)] += w01 * g;
    grad[static_cast<size_t>(base + int64_t(ay.i1) * res_x + ax.i1)] += w11 * g;
  }
}

CubeGrid CubeGrid::create(ParamStore& store, const std::string& name, int channels, int nx, int ny,
                          int nz, const Aabb& aabb, LrGroup group) {
  if (!aabb.valid()) throw InputError("cube grid: aabb min must be < max componentwise");
  CubeGrid g;
  g.channels = channels;
  g.nx = nx;
  g.ny = ny;
  g.nz = nz;
  g.aabb = aabb;
  g.data = &store.create(name, {channels, nx, ny, nz}, group);
  return g;
}

void CubeGrid::sample(const Vec3& p, Real* out) const {
  const GridAxis ax = locate_on_axis(p.x(), aabb.min.x(), aabb.max.x(), nx);
  const GridAxis ay = locate_on_axis(p.y(), aabb.min.y(), aabb.max.y(), ny);
  const GridAxis az = locate_on_axis(p.z(), aabb.min.z(), aabb.max.z(), nz);
  const Real* v = data->values.data();
  for (int c = 0; c < channels; ++c) {
    Real acc = 0;
    for (int dx = 0; dx < 2; ++dx) {
      const Real wx = dx ? ax.frac : 1 - ax.frac;
      const int ix = dx ? ax.i1 : ax.i0;
      for (int dy = 0; dy < 2; ++dy) {
        const Real wy = dy ? ay.frac : 1 - ay.frac;
        const int iy = dy ? ay.i1 : ay.i0;
        for (int dz = 0; dz < 2; ++dz) {
          const Real wz = dz ? az.frac : 1 - az.frac;
          const int iz = dz ? az.i1 : az.i0;
          acc += wx * wy * wz * v[index(c, ix, iy, iz)];
        }
      }
    }
    out[c] = acc;
  }
}

void CubeGrid::sample_backward(const Vec3& p, const Real* upstream, std::vector<Real>& grad) const {
  const GridAxis ax = locate_on_axis(p.x(), aabb.min.x(), aabb.max.x(), nx);
  const GridAxis ay = locate_on_axis(p.y(), aabb.min.y(), aabb.max.y(), ny);
  const GridAxis az = locate_on_axis(p.z(), aabb.min.z(), aabb.max.z(), nz);
  for (int c = 0; c < channels; ++c) {
    const Real g = upstream[c];
    for (int dx = 0; dx < 2; ++dx) {
      const Real wx = dx ? ax.frac : 1 - ax.frac;
      const int ix = dx ? ax.i1 : ax.i0;
      for (int dy = 0; dy < 2; ++dy) {
        const Real wy = dy ? ay.frac : 1 - ay.frac;
        const int iy = dy ? ay.i1 : ay.i0;
        for (int dz = 0; dz < 2; ++dz) {
          const Real wz = dz ? az.frac : 1 - az.frac;
          const int iz = dz ? az.i1 : az.i0;
          grad[static_cast<size_t>(index(c, ix, iy, iz))] += wx * wy * wz * g;
        }
      }
    }
  }
}

Real CubeGrid::min_voxel_edge() const {
  const Vec3 e = aabb.extent();
  const Real ex = e.x() / std::max(1, nx - 1);
  const Real ey = e.y() / std::max(1, ny - 1);
  const Real ez = e.z() / std::max(1, nz - 1);
  return std::min({ex, ey, ez});
}

ReliabilityGrid ReliabilityGrid::create(ParamStore& store, const std::string& name, int nx, int ny,
                                        int nz) {
  ReliabilityGrid g;
  g.nx = nx;
  g.ny = ny;
  g.nz = nz;
  g.data = &store.create(name, {1, nx, ny, nz}, LrGroup::kReliability);
  return g;
}

Real ReliabilityGrid::sample(const Vec3& ndc) const {
  const GridAxis ax = locate_on_axis(ndc.x(), -1.0, 1.0, nx);
  const GridAxis ay = locate_on_axis(ndc.y(), -1.0, 1.0, ny);
  const GridAxis az = locate_on_axis(ndc.z(), -1.0, 1.0, nz);
  const Real* v = data->values.data();
  Real acc = 0;
  for (int dx = 0; dx < 2; ++dx) {
    const Real wx = dx ? ax.frac : 1 - ax.frac;
    const int ix = dx ? ax.i1 : ax.i0;
    for (int dy = 0; dy < 2; ++dy) {
      const Real wy = dy ? ay.frac : 1 - ay.frac;
      const int iy = dy ? ay.i1 : ay.i0;
      for (int dz = 0; dz < 2; ++dz) {
        const Real wz = dz ? az.frac : 1 - az.frac;
        const int iz = dz ? az.i1 : az.i0;
        acc += wx * wy * wz * v[index(ix, iy, iz)];
      }
    }
  }
  return acc;
}

void ReliabilityGrid::sample_backward(const Vec3& ndc, Real upstream,
                                      std::vector<Real>& grad) const {
  const GridAxis ax = locate_on_axis(ndc.x(), -1.0, 1.0, nx);
  const GridAxis ay = locate_on_axis(ndc.y(), -1.0, 1.0, ny);
  const GridAxis az = locate_on_axis(ndc.z(), -1.0, 1.0, nz);
  for (int dx = 0; dx < 2; ++dx) {
    const Real wx = dx ? ax.frac : 1 - ax.frac;
    const int ix = dx ? ax.i1 : ax.i0;
    for (int dy = 0; dy < 2; ++dy) {
      const Real wy = dy ? ay.frac : 1 - ay.frac;
      const int iy = dy ? ay.i1 : ay.i0;
      for (int dz = 0; dz < 2; ++dz) {
        const Real wz = dz ? az.frac : 1 - az.frac;
        const int iz = dz ? az.i1 : az.i0;
        grad[static_cast<size_t>(index(ix, iy, iz))] += wx * wy * wz * upstream;
      }
    }
  }
}

}  // namespace mmpi
