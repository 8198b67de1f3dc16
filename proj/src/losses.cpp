#include "mmpi/losses.hpp"

#include <array>
#include <cmath>

namespace mmpi {

namespace {

constexpr Real kEntropyEps = 1e-6;

// Squared-difference TV over selected axes of a 4D C-order tensor, averaged
// over the pair count. Accumulates weight * d(loss) when grad != nullptr.
Real tv_accumulate_nd(const std::vector<Real>& v, const std::array<int64_t, 4>& dims,
                      std::span<const int> axes, Real weight, std::vector<Real>* grad) {
  std::array<int64_t, 4> stride;
  stride[3] = 1;
  for (int a = 2; a >= 0; --a) stride[a] = stride[a + 1] * dims[a + 1];

  int64_t n_pairs = 0;
  for (int axis : axes) {
    if (dims[axis] < 2) continue;
    int64_t other = 1;
    for (int a = 0; a < 4; ++a) {
      if (a != axis) other *= dims[a];
    }
    n_pairs += other * (dims[axis] - 1);
  }
  if (n_pairs == 0) return 0;

  Real total = 0;
  const Real inv = 1.0 / static_cast<Real>(n_pairs);
  for (int axis : axes) {
    if (dims[axis] < 2) continue;
    const int64_t s = stride[axis];
    std::array<int64_t, 4> n = dims;
    n[axis] -= 1;
    for (int64_t i0 = 0; i0 < n[0]; ++i0) {
      for (int64_t i1 = 0; i1 < n[1]; ++i1) {
        for (int64_t i2 = 0; i2 < n[2]; ++i2) {
          const int64_t base = (i0 * dims[1] + i1) * dims[2] * dims[3] + i2 * dims[3];
          for (int64_t i3 = 0; i3 < n[3]; ++i3) {
            const int64_t idx = base + i3;
            const Real d = v[static_cast<size_t>(idx + s)] - v[static_cast<size_t>(idx)];
            total += d * d;
            if (grad != nullptr) {
              const Real g = 2.0 * d * inv * weight;
              (*grad)[static_cast<size_t>(idx + s)] += g;
              (*grad)[static_cast<size_t>(idx)] -= g;
            }
          }
        }
      }
    }
  }
  return total * inv;
}

std::array<int64_t, 4> shape4(const Tensor& t) {
  return {t.shape[0], t.shape[1], t.shape[2], t.shape[3]};
}

}  // namespace

Real photometric_loss(std::span<const Vec3> rendered, std::span<const Vec3> target) {
  if (rendered.size() != target.size()) throw UsageError("photometric_loss: size mismatch");
  if (rendered.empty()) return 0;
  Real acc = 0;
  for (size_t i = 0; i < rendered.size(); ++i) {
    acc += (rendered[i] - target[i]).squaredNorm();
  }
  return acc / (3.0 * static_cast<Real>(rendered.size()));
}

Vec3 photometric_loss_grad(const Vec3& rendered, const Vec3& target, size_t n_rays) {
  return (2.0 / (3.0 * static_cast<Real>(n_rays))) * (rendered - target);
}

Real per_point_rgb_loss(std::span<const Real> weights, std::span<const Vec3> colors,
                        const Vec3& target) {
  Real acc = 0;
  for (size_t k = 0; k < weights.size(); ++k) {
    acc += weights[k] * (colors[k] - target).squaredNorm();
  }
  return acc;
}

void per_point_rgb_loss_grad(std::span<const Real> weights, std::span<const Vec3> colors,
                             const Vec3& target, Real scale, std::span<Real> d_weights,
                             std::span<Vec3> d_colors) {
  for (size_t k = 0; k < weights.size(); ++k) {
    d_weights[k] += scale * (colors[k] - target).squaredNorm();
    d_colors[k] += scale * weights[k] * 2.0 * (colors[k] - target);
  }
}

Real background_entropy_loss(std::span<const Real> opacities) {
  if (opacities.empty()) return 0;
  Real acc = 0;
  for (Real o : opacities) {
    if (o <= 0 || o >= 1) continue;  // exact limits contribute 0
    const Real c = std::clamp(o, kEntropyEps, 1.0 - kEntropyEps);
    acc += -(c * std::log(c) + (1.0 - c) * std::log(1.0 - c));
  }
  return acc / static_cast<Real>(opacities.size());
}

Real background_entropy_grad(Real opacity) {
  if (opacity <= kEntropyEps || opacity >= 1.0 - kEntropyEps) return 0;
  return -std::log(opacity / (1.0 - opacity));
}

Real distortion_loss(std::span<const Real> weights, std::span<const Real> s,
                     std::span<const Real> ds) {
  const size_t n = weights.size();
  if (s.size() != n || ds.size() != n) throw UsageError("distortion_loss: size mismatch");
  Real pair_acc = 0;
  Real w_pre = 0;   // sum of w_i, i < m
  Real ws_pre = 0;  // sum of w_i s_i, i < m
  Real self_acc = 0;
  for (size_t m = 0; m < n; ++m) {
    pair_acc += weights[m] * (s[m] * w_pre - ws_pre);
    w_pre += weights[m];
    ws_pre += weights[m] * s[m];
    self_acc += weights[m] * weights[m] * ds[m];
  }
  return 2.0 * pair_acc + self_acc / 3.0;
}

void distortion_loss_grad(std::span<const Real> weights, std::span<const Real> s,
                          std::span<const Real> ds, Real scale, std::span<Real> d_weights) {
  const size_t n = weights.size();
  Real w_total = 0;
  Real ws_total = 0;
  for (size_t m = 0; m < n; ++m) {
    w_total += weights[m];
    ws_total += weights[m] * s[m];
  }
  Real w_pre = 0;
  Real ws_pre = 0;
  for (size_t m = 0; m < n; ++m) {
    const Real w_inc = w_pre + weights[m];    // sum over i <= m
    const Real ws_inc = ws_pre + weights[m] * s[m];
    const Real below = s[m] * w_pre - ws_pre;
    const Real above = (ws_total - ws_inc) - s[m] * (w_total - w_inc);
    d_weights[m] += scale * (2.0 * (below + above) + (2.0 / 3.0) * weights[m] * ds[m]);
    w_pre = w_inc;
    ws_pre = ws_inc;
  }
}

Real tv_loss_planes(const PlaneStack& stack) {
  return tv_accumulate_nd(stack.data->values, shape4(*stack.data), std::array<int, 2>{2, 3}, 0,
                          nullptr);
}

Real tv_loss_cube(const CubeGrid& grid) {
  return tv_accumulate_nd(grid.data->values, shape4(*grid.data), std::array<int, 3>{1, 2, 3}, 0,
                          nullptr);
}

Real tv_loss_reliability(const ReliabilityGrid& grid) {
  return tv_accumulate_nd(grid.data->values, shape4(*grid.data), std::array<int, 3>{1, 2, 3}, 0,
                          nullptr);
}

Real tv_planes_accumulate(const PlaneStack& stack, Real weight, std::vector<Real>& grad) {
  return tv_accumulate_nd(stack.data->values, shape4(*stack.data), std::array<int, 2>{2, 3},
                          weight, &grad);
}

Real tv_cube_accumulate(const CubeGrid& grid, Real weight, std::vector<Real>& grad) {
  return tv_accumulate_nd(grid.data->values, shape4(*grid.data), std::array<int, 3>{1, 2, 3},
                          weight, &grad);
}

Real tv_reliability_accumulate(const ReliabilityGrid& grid, Real weight, std::vector<Real>& grad) {
  return tv_accumulate_nd(grid.data->values, shape4(*grid.data), std::array<int, 3>{1, 2, 3},
                          weight, &grad);
}

}  // namespace mmpi
