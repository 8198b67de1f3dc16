#pragma once

#include <vector>

#include "mmpi/param_store.hpp"
#include "mmpi/types.hpp"

namespace mmpi {

/// Node-centred 1D lookup: maps a coordinate in [lo,hi] to the two bracketing
/// node indices and the interpolation fraction, clamping out-of-range queries
/// to the border (D4 clamp policy).
struct GridAxis {
  int i0 = 0;
  int i1 = 0;
  Real frac = 0;
};

GridAxis locate_on_axis(Real x, Real lo, Real hi, int n);

/// Stack of L learnable image planes over one MPI's NDC cube. Values are laid
/// out channel-major, plane-major, row-major: ((c*L + l)*res_y + iy)*res_x + ix.
/// plane_z holds the L NDC depths, strictly increasing over [-1, 1]; uniform
/// spacing in NDC z is uniform disparity in world depth.
struct PlaneStack {
  int channels = 0;
  int planes = 0;
  int res_x = 0;
  int res_y = 0;
  std::vector<Real> plane_z;
  Tensor* data = nullptr;

  static PlaneStack create(ParamStore& store, const std::string& name, int channels, int planes,
                           int res_x, int res_y, LrGroup group);

  int64_t index(int c, int l, int iy, int ix) const {
    return ((int64_t(c) * planes + l) * res_y + iy) * res_x + ix;
  }

  /// Bilinear sample of plane `l` at NDC (x, y); writes `channels` values.
  void sample(int l, Real x, Real y, Real* out) const;

  /// Scatter upstream (one value per channel) through the bilinear weights.
  void sample_backward(int l, Real x, Real y, const Real* upstream,
                       std::vector<Real>& grad) const;
};

/// Evenly spaced NDC plane depths covering [-1, 1] inclusive; the last plane
/// sits at a_z = 1 (infinity in world space).
std::vector<Real> uniform_plane_depths(int planes);

/// Dense world-space voxel grid with trilinear interpolation, layout
/// ((c*nx + ix)*ny + iy)*nz + iz.
struct CubeGrid {
  int channels = 0;
  int nx = 0, ny = 0, nz = 0;
  Aabb aabb;
  Tensor* data = nullptr;

  static CubeGrid create(ParamStore& store, const std::string& name, int channels, int nx, int ny,
                         int nz, const Aabb& aabb, LrGroup group);

  int64_t index(int c, int ix, int iy, int iz) const {
    return ((int64_t(c) * nx + ix) * ny + iy) * nz + iz;
  }

  void sample(const Vec3& p, Real* out) const;
  void sample_backward(const Vec3& p, const Real* upstream, std::vector<Real>& grad) const;

  Real min_voxel_edge() const;
};

/// 1-channel logit grid over an MPI's NDC cube [-1,1]^3, trilinear on all
/// three axes.
struct ReliabilityGrid {
  int nx = 0, ny = 0, nz = 0;
  Tensor* data = nullptr;

  static ReliabilityGrid create(ParamStore& store, const std::string& name, int nx, int ny, int nz);

  int64_t index(int ix, int iy, int iz) const { return (int64_t(ix) * ny + iy) * nz + iz; }

  Real sample(const Vec3& ndc) const;
  void sample_backward(const Vec3& ndc, Real upstream, std::vector<Real>& grad) const;
};

}  // namespace mmpi
