#pragma once

#include <span>
#include <vector>

#include "mmpi/grids.hpp"
#include "mmpi/types.hpp"

namespace mmpi {

struct LossWeights {
  Real pt_rgb = 1e-2;
  Real bg = 1e-3;
  Real dist = 1e-2;
  Real tv = 1e-5;
};

/// Mean squared error over a ray batch, per channel.
Real photometric_loss(std::span<const Vec3> rendered, std::span<const Vec3> target);
/// d(loss)/d(rendered[i]) for the batch form above.
Vec3 photometric_loss_grad(const Vec3& rendered, const Vec3& target, size_t n_rays);

/// sum_k w_k ||c_k - C_gt||^2 for one ray (norm = sum over channels).
Real per_point_rgb_loss(std::span<const Real> weights, std::span<const Vec3> colors,
                        const Vec3& target);
void per_point_rgb_loss_grad(std::span<const Real> weights, std::span<const Vec3> colors,
                             const Vec3& target, Real scale, std::span<Real> d_weights,
                             std::span<Vec3> d_colors);

/// Mean binary entropy of accumulated opacities; exactly 0 at opacity 0 or 1,
/// inputs clamped to [1e-6, 1 - 1e-6] otherwise.
Real background_entropy_loss(std::span<const Real> opacities);
Real background_entropy_grad(Real opacity);  // d(entropy)/d(opacity), one ray

/// sum_{i,j} w_i w_j |s_i - s_j| + (1/3) sum_i w_i^2 ds_i for one ray, with
/// s ascending in [0,1]. O(N) via prefix sums.
Real distortion_loss(std::span<const Real> weights, std::span<const Real> s,
                     std::span<const Real> ds);
void distortion_loss_grad(std::span<const Real> weights, std::span<const Real> s,
                          std::span<const Real> ds, Real scale, std::span<Real> d_weights);

/// Mean squared difference of adjacent texels along each applicable axis
/// (x,y within each plane for stacks; x,y,z for cubes and reliability grids).
Real tv_loss_planes(const PlaneStack& stack);
Real tv_loss_cube(const CubeGrid& grid);
Real tv_loss_reliability(const ReliabilityGrid& grid);

/// Fused forward+backward: returns the loss and accumulates weight * d(loss)
/// into the grad vector.
Real tv_planes_accumulate(const PlaneStack& stack, Real weight, std::vector<Real>& grad);
Real tv_cube_accumulate(const CubeGrid& grid, Real weight, std::vector<Real>& grad);
Real tv_reliability_accumulate(const ReliabilityGrid& grid, Real weight, std::vector<Real>& grad);

}  // namespace mmpi
