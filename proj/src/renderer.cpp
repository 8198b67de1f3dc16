#include "mmpi/renderer.hpp"

#include <algorithm>
#include <cmath>

#include "mmpi/reliability.hpp"

namespace mmpi {

namespace {

constexpr Real kDepthCap = 1e6;

}  // namespace

int RenderOptions::active_mpi_count(int total) const {
  if (active_mpis.empty()) return total;
  int n = 0;
  for (int i = 0; i < total; ++i) n += mpi_active(i) ? 1 : 0;
  return n;
}

Real normalized_distance(Real d) {
  if (std::isinf(d)) return 1.0;
  return d / (1.0 + d);
}

void mpi_ray_samples(const MpiField& mpi, const Ray& ray, std::vector<FieldSample>& out) {
  const NdcRay line = ndc_project_ray(mpi.frustum, ray);
  if (!line.facing) return;  // forward-facing check

  const int L = mpi.density.planes;
  const size_t first = out.size();
  for (int l = 0; l < L; ++l) {
    const Real a_z = mpi.density.plane_z[static_cast<size_t>(l)];
    // Uniform plane depths make the line parameter t' = (a_z + 1) / 2.
    const Real t_line = (a_z - line.origin.z()) / line.dir.z();
    const Vec3 p = line.origin + t_line * line.dir;
    if (std::abs(p.x()) > 1.0 || std::abs(p.y()) > 1.0) continue;

    FieldSample s;
    s.field = mpi.id;
    s.plane = l;
    s.point = p;
    s.shade_dir = line.dir.normalized();
    if (a_z >= 1.0) {
      s.at_infinity = true;
      s.dist = kInfinity;
      s.world_pos = ray.dir;  // direction of the point at infinity
    } else {
      const Vec3 w = ndc_unproject(mpi.frustum, p);
      const Real t_world = (w - ray.origin).dot(ray.dir);
      if (!(t_world > 0)) continue;  // behind the ray origin
      s.dist = t_world;
      s.world_pos = w;
    }
    out.push_back(s);
  }

  // Per-MPI delta: NDC distance between consecutive kept samples; the last
  // reuses the previous one (D14). Kept crossings are consecutive because
  // NDC coordinates are affine in t', so the spacing is uniform per ray.
  const size_t n = out.size() - first;
  if (n == 0) return;
  const Real uniform_step = 0.5 * mpi.nominal_delta * line.dir.norm();
  if (n == 1) {
    out[first].delta = uniform_step;
    return;
  }
  for (size_t k = 0; k + 1 < n; ++k) {
    out[first + k].delta = (out[first + k + 1].point - out[first + k].point).norm();
  }
  out[first + n - 1].delta = out[first + n - 2].delta;
}

void cube_ray_samples(const CubeField& cube, int field_id, const Ray& ray,
                      std::vector<FieldSample>& out) {
  const Aabb& box = cube.density.aabb;
  Real t0 = 0;
  Real t1 = kInfinity;
  for (int a = 0; a < 3; ++a) {
    if (ray.dir[a] == 0) {
      if (ray.origin[a] < box.min[a] || ray.origin[a] > box.max[a]) return;
      continue;
    }
    Real lo = (box.min[a] - ray.origin[a]) / ray.dir[a];
    Real hi = (box.max[a] - ray.origin[a]) / ray.dir[a];
    if (lo > hi) std::swap(lo, hi);
    t0 = std::max(t0, lo);
    t1 = std::min(t1, hi);
  }
  if (!(t1 > t0)) return;

  const int n = static_cast<int>(std::floor((t1 - t0) / cube.step + 1e-9));
  const Vec3 inv_extent = box.extent().cwiseInverse();
  for (int k = 0; k < n; ++k) {
    const Real t = t0 + (k + 0.5) * cube.step;
    if (t > t1) break;
    FieldSample s;
    s.field = field_id;
    s.plane = k;
    s.dist = t;
    s.delta = cube.step;
    s.world_pos = ray.origin + t * ray.dir;
    s.point = 2.0 * (s.world_pos - box.min).cwiseProduct(inv_extent) - Vec3::Ones();
    s.shade_dir = ray.dir;
    out.push_back(s);
  }
}

bool shade_sample(const SceneModel& model, const RenderOptions& opts, FieldSample& s,
                  RayWorkspace& ws) {
  const bool is_cube = s.field == model.cube_field_id();
  Real sigma;
  ws.feat_buf.resize(static_cast<size_t>(model.config.head.feature_dim));
  if (is_cube) {
    const CubeField& cube = *model.cube;
    cube.density.sample(s.world_pos, &s.raw_sigma);
    sigma = softplus(s.raw_sigma + cube.density_shift);
    s.alpha = -std::expm1(-sigma * s.delta);
    if (s.alpha < opts.alpha_thresh) return false;
    cube.feature.sample(s.world_pos, ws.feat_buf.data());
  } else {
    const MpiField& mpi = model.mpis[static_cast<size_t>(s.field)];
    mpi.density.sample(s.plane, s.point.x(), s.point.y(), &s.raw_sigma);
    sigma = softplus(s.raw_sigma + mpi.density_shift);
    s.alpha = -std::expm1(-sigma * s.delta);
    if (s.alpha < opts.alpha_thresh) return false;
    mpi.feature.sample(s.plane, s.point.x(), s.point.y(), ws.feat_buf.data());
  }
  s.tape_row = ws.mlp.rows;
  s.rgb = model.head.forward(ws.feat_buf, s.point, s.shade_dir, ws.mlp);
  return true;
}

std::vector<FieldSample> sample_mpi(const SceneModel& model, int i, const Ray& ray,
                                    RayWorkspace& ws, const RenderOptions& opts) {
  std::vector<FieldSample> samples;
  mpi_ray_samples(model.mpis[static_cast<size_t>(i)], ray, samples);
  size_t kept = 0;
  for (auto& s : samples) {
    if (shade_sample(model, opts, s, ws)) samples[kept++] = s;
  }
  samples.resize(kept);
  return samples;
}

std::vector<FieldSample> sample_cube_field(const SceneModel& model, const Ray& ray,
                                           RayWorkspace& ws, const RenderOptions& opts) {
  if (!model.cube) throw ConfigError("sample_cube_field: model has no cube grid");
  std::vector<FieldSample> samples;
  cube_ray_samples(*model.cube, model.cube_field_id(), ray, samples);
  size_t kept = 0;
  for (auto& s : samples) {
    if (shade_sample(model, opts, s, ws)) samples[kept++] = s;
  }
  samples.resize(kept);
  return samples;
}

void merge_samples(std::vector<FieldSample>& samples) {
  std::sort(samples.begin(), samples.end(), [](const FieldSample& a, const FieldSample& b) {
    if (a.dist != b.dist) return a.dist < b.dist;
    if (a.field != b.field) return a.field < b.field;
    return a.plane < b.plane;
  });
}

RenderOutput composite(std::span<FieldSample> batch, const RenderOptions& opts) {
  RenderOutput out;
  Real t = 1.0;
  Real depth_acc = 0;
  Real prev_dist = -kInfinity;
  for (auto& s : batch) {
    if (s.dist < prev_dist) throw UsageError("composite: batch is not sorted by distance");
    prev_dist = s.dist;
    const Real a = s.blend * s.alpha;
    const Real w = t * a;
    s.trans = t;
    s.weight = w;
    out.color += w * s.rgb;
    out.opacity += w;
    depth_acc += w * std::min(s.dist, kDepthCap);
    t = t * (1.0 - a);
    ++out.n_samples;
  }
  out.trans_final = t;
  out.color += t * opts.background;
  out.depth = out.opacity > 1e-12 ? depth_acc / out.opacity : kDepthCap;
  return out;
}

RenderOutput render_ray(const SceneModel& model, const Ray& ray, const RenderOptions& opts,
                        RayWorkspace& ws) {
  const int n_active = opts.active_mpi_count(static_cast<int>(model.mpis.size()));
  if (n_active == 0) {
    throw ConfigError("render_ray: the cube grid cannot render without at least one MPI");
  }
  ws.clear();

  for (size_t i = 0; i < model.mpis.size(); ++i) {
    if (!opts.mpi_active(static_cast<int>(i))) continue;
    mpi_ray_samples(model.mpis[i], ray, ws.samples);
  }
  if (model.cube && opts.use_cube) {
    cube_ray_samples(*model.cube, model.cube_field_id(), ray, ws.samples);
  }
  merge_samples(ws.samples);

  // Shade in merged order so the transmittance cutoff can stop the ray early;
  // with the cutoff disabled this is identical to shading per field.
  ws.rel_k = opts.reliability ? n_active : 0;
  RenderOutput out;
  Real t = 1.0;
  Real depth_acc = 0;
  size_t kept = 0;
  for (size_t k = 0; k < ws.samples.size(); ++k) {
    FieldSample s = ws.samples[k];
    if (!shade_sample(model, opts, s, ws)) continue;
    if (opts.reliability && s.field != model.cube_field_id()) {
      s.rel_row = static_cast<int32_t>(ws.rel_logits.size() / ws.rel_k);
      const size_t base = ws.rel_logits.size();
      ws.rel_logits.resize(base + static_cast<size_t>(ws.rel_k));
      ws.rel_points.resize(base + static_cast<size_t>(ws.rel_k));
      gather_logits(model, opts, s, ws.rel_logits.data() + base, ws.rel_points.data() + base);
      int owner = 0;
      for (int j = 0; j < s.field; ++j) owner += opts.mpi_active(j) ? 1 : 0;
      s.blend = softmax_confidence(
          std::span<const Real>(ws.rel_logits.data() + base, static_cast<size_t>(ws.rel_k)),
          owner);
    } else {
      s.blend = 1.0;  // cube samples stay outside the softmax (D12)
    }

    const Real a = s.blend * s.alpha;
    const Real w = t * a;
    s.trans = t;
    s.weight = w;
    out.color += w * s.rgb;
    out.opacity += w;
    depth_acc += w * std::min(s.dist, kDepthCap);
    t = t * (1.0 - a);
    ws.samples[kept++] = s;
    ++out.n_samples;
    if (opts.trans_cutoff > 0 && t < opts.trans_cutoff) break;
  }
  ws.samples.resize(kept);
  out.trans_final = t;
  out.color += t * opts.background;
  out.depth = out.opacity > 1e-12 ? depth_acc / out.opacity : kDepthCap;
  return out;
}

void render_backward(const SceneModel& model, const RenderOptions& opts, RayWorkspace& ws,
                     const RayUpstream& up, GradBuffer& grads, const BackwardOptions& bopts) {
  const size_t n = ws.samples.size();
  if (!up.d_weight.empty() && up.d_weight.size() != n) {
    throw UsageError("render_backward: d_weight size mismatch");
  }
  if (!up.d_sample_rgb.empty() && up.d_sample_rgb.size() != n) {
    throw UsageError("render_backward: d_sample_rgb size mismatch");
  }

  ws.scratch.resize(static_cast<size_t>(model.config.head.feature_dim));
  std::vector<Real> d_logits(static_cast<size_t>(std::max(ws.rel_k, 1)));

  // Adjoint of the front-to-back scan, division-free:
  //   t_bar_k = u_k a_k + t_bar_{k+1} (1 - a_k),  dL/da_k = T_k (u_k - t_bar_{k+1})
  // where u_k collects every direct dL/dw_k contribution and t_bar_{N+1} is
  // the background term dL/dT_final.
  Real t_bar = up.d_color.dot(opts.background);
  for (size_t ri = n; ri-- > 0;) {
    FieldSample& s = ws.samples[ri];
    const Real a = s.blend * s.alpha;
    Real u = up.d_color.dot(s.rgb) + up.d_opacity;
    if (!up.d_weight.empty()) u += up.d_weight[ri];
    const Real d_a = s.trans * (u - t_bar);
    t_bar = u * a + t_bar * (1.0 - a);

    Vec3 d_rgb = s.weight * up.d_color;
    if (!up.d_sample_rgb.empty()) d_rgb += up.d_sample_rgb[ri];

    const Real d_alpha = s.blend * d_a;
    const Real d_blend = s.alpha * d_a;

    if (bopts.reliability_grads && s.rel_row >= 0) {
      const size_t base = static_cast<size_t>(s.rel_row) * ws.rel_k;
      int owner = 0;
      for (int j = 0; j < s.field; ++j) owner += opts.mpi_active(j) ? 1 : 0;
      std::span<const Real> logits(ws.rel_logits.data() + base, static_cast<size_t>(ws.rel_k));
      softmax_backward(logits, owner, d_blend, d_logits.data());
      reliability_backward(
          model, opts, std::span<const Vec3>(ws.rel_points.data() + base, ws.rel_k),
          std::span<const Real>(d_logits.data(), static_cast<size_t>(ws.rel_k)), grads);
    }

    if (!bopts.field_grads) continue;

    // alpha = 1 - exp(-sigma delta), sigma = softplus(raw + shift)
    const bool is_cube = s.field == model.cube_field_id();
    const Real shift =
        is_cube ? model.cube->density_shift : model.mpis[static_cast<size_t>(s.field)].density_shift;
    const Real d_sigma = d_alpha * s.delta * (1.0 - s.alpha);
    const Real d_raw = d_sigma * sigmoid(s.raw_sigma + shift);

    model.head.backward(ws.mlp, s.tape_row, s.rgb, d_rgb, ws.scratch.data(), grads);

    if (is_cube) {
      const CubeField& cube = *model.cube;
      cube.density.sample_backward(s.world_pos, &d_raw, grads.of(*cube.density.data));
      cube.feature.sample_backward(s.world_pos, ws.scratch.data(), grads.of(*cube.feature.data));
    } else {
      const MpiField& mpi = model.mpis[static_cast<size_t>(s.field)];
      mpi.density.sample_backward(s.plane, s.point.x(), s.point.y(), &d_raw,
                                  grads.of(*mpi.density.data));
      mpi.feature.sample_backward(s.plane, s.point.x(), s.point.y(), ws.scratch.data(),
                                  grads.of(*mpi.feature.data));
    }
  }
}

}  // namespace mmpi
